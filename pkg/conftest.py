import sys
from pathlib import Path

# raiz do repositório no path, como no script de entrada
sys.path.insert(0, str(Path(__file__).parent))
