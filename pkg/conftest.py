import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance: pruebas de aceptacion de extremo a extremo (lentas)"
    )
