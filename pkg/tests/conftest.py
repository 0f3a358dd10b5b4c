from importlib import resources
from pathlib import Path

import pytest

from vstflow.parser import parse_file

CORPUS = Path(str(resources.files("vstflow") / "corpus"))
FIXTURES = Path(__file__).parent / "fixtures"


def corpus_files():
    return sorted(CORPUS.glob("*.ifc.c"))


def tags(path):
    """Words of the `// category:` header, e.g. {"insecure", "loop"}."""
    first = path.read_text().splitlines()[0]
    assert first.startswith("// category:"), path
    return set(first.split(":", 1)[1].split())


def corpus_with(tag):
    return [p for p in corpus_files() if tag in tags(p)]


@pytest.fixture(scope="session")
def corpus():
    return {p.name: parse_file(p) for p in corpus_files()}


ACCEPTANCE: dict[int, str] = {}


def record(n, ok, text):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {text}"
    ACCEPTANCE[n] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
