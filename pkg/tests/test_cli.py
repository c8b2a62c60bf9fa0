import io
import json
import subprocess
import sys

import pytest

from sftlab.cli import run
from sftlab.corpus import parse_corpus, run_corpus
from sftlab.errors import FormatError
from sftlab.report import RunReport, digest


def _run(argv, cwd=None, monkeypatch=None):
    buf = io.StringIO()
    code, rep = run(argv, out=buf)
    return code, rep, buf.getvalue()


@pytest.fixture(autouse=True)
def in_corpus(monkeypatch, corpus_dir):
    monkeypatch.chdir(corpus_dir)


def test_one_dimensional_verdicts():
    code, rep, text = _run(["check-empty-1d", "golden-mean.sft"])
    assert code == 0 and rep.lookup("word") == "0" and "exit=0" in text
    code, rep, _ = _run(["check-empty-1d", "dead-end.sft"])
    assert code == 1 and rep.lookup("verdict") == "empty"


def test_reports_are_byte_stable():
    argv = ["check-empty", "--fuel", "4", "checkerboard.sft"]
    assert _run(argv)[2] == _run(argv)[2]
    assert _run(["--format", "compact"] + argv)[2] == _run(["--format", "compact"] + argv)[2]


def test_compact_is_one_json_line():
    _, _, text = _run(["--format", "compact", "count", "--n", "5", "golden-mean.sft"])
    assert text.count("\n") == 1
    rec = json.loads(text)
    assert rec["count"] == 13 and rec["exit"] == 0 and rec["command"] == "count"


def test_inputs_digest_tracks_file_contents(tmp_path):
    a = tmp_path / "a.sft"
    a.write_text("dim 1\nalphabet 0 1\nforbid\nsite 0 = 1\nsite 1 = 1\n")
    first = _run(["count", "--n", "3", str(a)])[1].inputs
    a.write_text("dim 1\nalphabet 0 1\nforbid\nsite 0 = 0\nsite 1 = 0\n")
    assert _run(["count", "--n", "3", str(a)])[1].inputs != first


@pytest.mark.parametrize("argv, code", [
    (["nonsense"], 64),
    (["count", "golden-mean.sft"], 64),
    (["count", "--n", "0", "golden-mean.sft"], 64),
    (["check-empty-1d", "golden-mean-2d.sft"], 64),
    (["check-empty-1d", "no-such-file.sft"], 64),
    (["check-empty-1d", "xor.code"], 65),
    (["code", "apply", "xor.code", "0120"], 65),
    (["count", "--n", "9", "--budget", "10", "golden-mean.sft"], 2),
    (["attractor", "test-cell", "half.oracle", "half.trap", "--cell", "level=3 corner=-1", "--fuel", "4"], 2),
    (["check-empty", "--fuel", "4", "bad-wang.tiles"], 1),
])
def test_exit_codes(argv, code):
    got, rep, text = _run(argv)
    assert got == code == rep.exit_code
    assert f"exit={code}" in text


def test_error_records_are_structured():
    _, rep, text = _run(["check-empty-1d", "xor.code"])
    assert rep.lookup("error") == "FormatError"
    assert text.splitlines()[0] == "command=check-empty-1d"


def test_certificate_output(tmp_path):
    cert = tmp_path / "c.torus"
    code, _, _ = _run(["check-empty", "--fuel", "4", "--cert-out", str(cert), "checkerboard.sft"])
    assert code == 0
    code, rep, _ = _run(["verify-cert", "checkerboard.sft", str(cert)])
    assert code == 0 and rep.lookup("verified") == "true"


def test_encode_writes_cylinders(tmp_path):
    out = tmp_path / "pairs.eds"
    code, rep, _ = _run(["attractor", "encode", "half.oracle", "half.trap", "--fuel", "8",
                         "--depth", "1", "--out", str(out)])
    assert code == 0 and rep.lookup("emitted") == "3"
    assert out.read_text().count("gencyl") == 3


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sftlab.cli", "count", "--n", "4", "golden-mean.sft"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "count=8" in proc.stdout


# --- report ---------------------------------------------------------------------------------

def test_report_rendering():
    rep = RunReport("x", "abc").add(flag=True, xs=[1, 2], none=None, text="a\nb")
    rep.blocks["body"] = "l1\nl2\n"
    assert rep.to_text() == ("command=x\ninputs=abc\nflag=true\nxs=1,2\nnone=-\ntext=a\\nb\n"
                             "exit=0\nbegin body\nl1\nl2\nend body\n")
    assert json.loads(rep.to_compact())["blocks"] == {"body": "l1\nl2\n"}


def test_digest_is_length_prefixed():
    assert digest([b"ab", b"c"]) != digest([b"a", b"bc"])


# --- corpus --------------------------------------------------------------------------------

def test_shipped_corpus_passes(corpus_dir):
    s = run_corpus(str(corpus_dir / "corpus.ini"))
    assert s.total == s.passed >= 25 and not s.mismatches


def test_negative_control_is_caught(corpus_dir):
    code, rep, text = _run(["corpus", "run", str(corpus_dir / "negative-control.ini")])
    assert code == 1
    assert rep.lookup("failed") == "1" and rep.lookup("passed") == "1"
    assert "count expected 12 got 13" in text


def test_empty_corpus_passes(tmp_path):
    p = tmp_path / "empty.ini"
    p.write_text("# nothing yet\n")
    code, rep, _ = _run(["corpus", "run", str(p)])
    assert code == 0 and rep.lookup("entries") == "0"


@pytest.mark.parametrize("text", [
    "[a]\nrun = count\nexpect = exit=0\n",
    "[a]\nrun = count\nexpect = exit\nbasis = b\n",
    "[a]\nrun = count\nexpect = exit=0\nbasis = b\nextra = 1\n",
    "no section\n",
])
def test_malformed_corpus(text):
    with pytest.raises(FormatError):
        parse_corpus(text)
