import pathlib
import subprocess
import sys

PROGRAMS = pathlib.Path(__file__).resolve().parents[1] / "programs"


def run_disco(args, stdin=""):
    return subprocess.run(
        [sys.executable, "-m", "disco.cli", *args],
        input=stdin, capture_output=True, text=True, timeout=120,
    )


def test_check_mode_passing_file_exits_zero():
    result = run_disco(["--check", "--offline", str(PROGRAMS / "gcd.disco")])
    assert result.returncode == 0, result.stderr
    assert "Certainly true: gcd(7, 6) == 1" in result.stdout


def test_check_mode_failing_test_exits_one(tmp_path):
    bad = tmp_path / "bad.disco"
    bad.write_text("!!! 1 == 2\nv : N\nv = 1\n")
    result = run_disco(["--check", "--offline", str(bad)])
    assert result.returncode == 1
    assert "Certainly false" in result.stdout


def test_check_mode_parse_error_exits_one(tmp_path):
    bad = tmp_path / "broken.disco"
    bad.write_text("f(x) = x\n")
    result = run_disco(["--check", "--offline", str(bad)])
    assert result.returncode == 1
    assert "missing type signature" in result.stdout


def test_repl_session_over_stdin():
    result = run_disco(["--offline"], stdin="1 + 1\n:quit\n")
    assert result.returncode == 0
    assert "Disco> " in result.stdout
    assert "2" in result.stdout


def test_eof_exits_cleanly():
    result = run_disco(["--offline"], stdin="")
    assert result.returncode == 0


def test_files_load_before_prompt():
    result = run_disco(["--offline", str(PROGRAMS / "gcd.disco")],
                       stdin="gcd(12, 18)\n:quit\n")
    assert result.returncode == 0
    # stdin is not a tty, so the answer lands right after the prompt
    assert "Disco> 6\n" in result.stdout


def test_ascii_flag():
    result = run_disco(["--offline", "--ascii"], stdin=":type -3\n:quit\n")
    assert "-3 : Z" in result.stdout


def test_seed_flag_changes_sampling_but_not_prefix():
    lines = ":test forall n:N. n /= 5\n:quit\n"
    a = run_disco(["--offline", "--seed", "1"], stdin=lines)
    b = run_disco(["--offline", "--seed", "2"], stdin=lines)
    assert "n = 5" in a.stdout and "n = 5" in b.stdout
