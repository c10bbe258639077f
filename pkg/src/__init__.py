# CubicLab package
