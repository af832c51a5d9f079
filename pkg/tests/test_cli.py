import subprocess
import sys

from helpers import PROGRAMS, parse_grid


def kb(*args, stdin="", cwd=None, timeout=300):
    return subprocess.run([sys.executable, "-m", "kbscript", *map(str, args)], input=stdin,
                          capture_output=True, text=True, cwd=cwd, timeout=timeout)


def test_missing_file():
    r = kb("no_such_file.kbp")
    assert r.returncode == 1
    assert "cannot open" in r.stderr
    assert r.stdout == ""


def test_parse_error_exit_code(tmp_path):
    f = tmp_path / "bad.kbp"
    f.write_text("vocabulary V { type T P(T) }\ntheory A : V { ! x : P(x . }\n")
    r = kb(f)
    assert r.returncode == 1
    assert r.stderr.startswith("error: ")
    assert "bad.kbp:2:" in r.stderr


def test_bad_flag_exit_code():
    r = kb("--seed", "notanumber")
    assert r.returncode == 2


def test_runtime_error_goes_to_stderr(tmp_path):
    f = tmp_path / "boom.kbp"
    f.write_text('procedure main() {\n  print("ok")\n  local t = nil\n  t.x = 1\n}\n')
    r = kb(f)
    assert r.returncode == 1
    assert r.stdout == "ok\n"
    assert r.stderr.startswith("error: ")
    assert "procedure main" in r.stderr


def test_main_runs_and_exits_zero(tmp_path):
    f = tmp_path / "hello.kbp"
    f.write_text('procedure main() { print("hello", 1 + 1) }\n')
    r = kb(f)
    assert (r.returncode, r.stdout, r.stderr) == (0, "hello\t2\n", "")


def test_repl_basics():
    r = kb(stdin="1+2\nx = 5\nx * 2\n:quit\n")
    assert r.returncode == 0
    assert r.stdout.splitlines()[0].startswith("kbscript")
    assert "3\n" in r.stdout and "10\n" in r.stdout


def test_repl_errors_do_not_exit():
    r = kb(stdin="undefined_fn()\n40 + 2\n")
    assert r.returncode == 0
    assert "attempt to call nil" in r.stderr
    assert "42" in r.stdout


def test_repl_lists_blocks():
    r = kb(PROGRAMS / "sudoku.kbp", "-i", stdin=":blocks\n:quit\n", cwd=PROGRAMS)
    # main ran first; the shell opens afterwards
    assert r.returncode == 0
    lines = r.stdout.splitlines()
    assert "procedure sudoku::solve" in lines
    assert "vocabulary sudoku::sudokuVoc" in lines
    assert "procedure main" in lines


def test_repl_show():
    r = kb(PROGRAMS / "sudoku.kbp", "-i", "--seed", "1", stdin=":show sudoku::sudokuTheory\n", cwd=PROGRAMS)
    assert "theory sudokuTheory : sudoku::sudokuVoc {" in r.stdout


def test_file_without_main_opens_repl(tmp_path):
    f = tmp_path / "lib.kbp"
    f.write_text("procedure double(x) { return 2 * x }\n")
    r = kb(f, stdin="double(21)\n")
    assert r.returncode == 0
    assert "42" in r.stdout


def test_seeded_sudoku_is_reproducible():
    a = kb(PROGRAMS / "sudoku4.kbp", "--seed", "3", cwd=PROGRAMS)
    b = kb(PROGRAMS / "sudoku4.kbp", "--seed", "3", cwd=PROGRAMS)
    assert a.returncode == 0, a.stderr
    assert a.stdout == b.stdout
    counts = [int(l.rsplit(" ", 1)[1]) for l in a.stdout.splitlines() if "models" in l]
    assert counts[0] == 288 and counts[-1] == 1
    assert all(x > y for x, y in zip(counts, counts[1:]))
    assert len(parse_grid("\n".join(a.stdout.splitlines()[len(counts):]))) == 16


def test_dump_ground(tmp_path):
    f = tmp_path / "p.kbp"
    f.write_text("vocabulary V { p q } theory T : V { p | q. } structure S : V { }\n"
                 "procedure main() { print(#modelExpand(T, S)) }\n")
    dump = tmp_path / "ground.txt"
    r = kb(f, "--dump-ground", dump)
    assert r.returncode == 0
    assert "\np cnf 2 1\n" in dump.read_text()
