# Backend package
