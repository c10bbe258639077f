#!/usr/bin/env python3
"""
CubicLab - 2-torção em grupos de classes de corpos cúbicos
Ponto de entrada único da linha de comando

Uso:
    python CubicLab.py <subcomando> [opções]
"""

import sys
from pathlib import Path

# Adicionar a raiz ao path para imports de src
sys.path.insert(0, str(Path(__file__).parent))

from src.cli.main_cli import main


if __name__ == "__main__":
    sys.exit(main())
