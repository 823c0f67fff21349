"""Command-line front end: a REPL and a batch runner over one session.

Commands (one per line, shell-style quoting):

    eval <name> "<predicate>"
    count <name> <param> "<predicate>"
    value <name> <n | [digits]>
    monoid <name> [cap]
    range <name>
    load-word <name> <path>
    load-relation <name> <path>
    load-numsys <path | fib>
    load-linrep <name> <path>
    export-dot <name> <path>
    save <name> <path>
    run <script>
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field
import shlex
import sys

from . import automata as au
from . import enumeration as en
from .automata import Dfa
from .compiler import CompileEnv, compile as compile_formula, verify_numsys
from .errors import FibautoError, ResourceExhausted
from .numeration import fib_bundle, read_bundle
from .words import load_word

EXIT_OK, EXIT_LOGIC, EXIT_RESOURCE, EXIT_IO = 0, 1, 2, 3
BATCH_TIMEOUT = 900.0
# summaries list finite languages up to this many members
_LIST_LIMIT = 50


class CommandError(FibautoError):
    """Malformed command line or unknown result name."""


@dataclass
class Session:
    env: CompileEnv = field(default_factory=CompileEnv)
    results: dict = field(default_factory=dict)
    closures: dict = field(default_factory=dict)
    out: object = None
    quiet: bool = False
    log_file: object = None

    def __post_init__(self):
        if self.out is None:
            self.out = sys.stdout

    def emit(self, text: str):
        print(text, file=self.out)

    def log(self, lines):
        for ln in lines:
            if not self.quiet:
                self.emit(ln)
            if self.log_file is not None:
                print(ln, file=self.log_file)

    def _store(self, name, value):
        # a name belongs to one result; redefining it replaces the old one
        self.results[name] = value
        self.closures.pop(name, None)

    def get(self, name, kind=None):
        if name not in self.results:
            raise CommandError(f"no result named {name!r}")
        value = self.results[name]
        if kind is not None and not isinstance(value, kind):
            raise CommandError(f"{name!r} is not a {kind.__name__}")
        return value

    # commands --------------------------------------------------------------------

    def cmd_eval(self, name, predicate):
        dfa, log = compile_formula(predicate, self.env)
        self.log(log.lines())
        self._store(name, dfa)
        self.emit(f"{name}: {summarize(dfa, self.env)}")

    def cmd_count(self, name, param, predicate):
        dfa, log = compile_formula(predicate, self.env)
        self.log(log.lines())
        r = en.linrep_from_dfa(dfa, param)
        self._store(name, r)
        self.emit(f"{name}: linear representation of rank {r.rank}")

    def cmd_value(self, name, n):
        r = self.get(name, en.LinearRepresentation)
        if n.startswith("[") and n.endswith("]"):
            digits = n[1:-1]
            if digits.strip("01"):
                raise CommandError(f"bad digit string {n!r}")
        else:
            digits = self.env.numsys.encode(_int(n))
        self.emit(str(en.evaluate_digits(r, digits)))

    def cmd_monoid(self, name, cap="100000"):
        r = self.get(name, en.LinearRepresentation)
        closure = en.monoid_closure(r, _int(cap))
        self.closures[name] = closure
        self.emit(f"{name}: monoid size {len(closure)} ({closure.outcome})")

    def cmd_range(self, name):
        r = self.get(name, en.LinearRepresentation)
        closure = self.closures.get(name) or en.monoid_closure(r)
        self.closures[name] = closure
        values = sorted(en.value_range(r, closure))
        self.emit(f"{name}: values {{{', '.join(map(str, values))}}}")

    def cmd_load_word(self, name, path):
        if name in self.env.words:
            raise CommandError(f"word {name!r} is already defined")
        wd = load_word(name, path, arity=None, universes=self._universes())
        self.env.add_word(name, wd)
        self.emit(f"{name}: word with {wd.dfao.num_states} states, alphabet {list(wd.alphabet)}")

    def cmd_load_relation(self, name, path):
        a = au.read_file(path, self._universes())
        if not isinstance(a, Dfa):
            raise CommandError(f"{path}: a relation needs a DFA file (no output lines)")
        self.env.add_relation(name, a)
        self._store(name, a)
        self.emit(f"{name}: relation on {a.num_tracks} tracks, {a.num_states} states")

    def cmd_load_numsys(self, path):
        bundle = fib_bundle() if path == "fib" else read_bundle(path)
        verify_numsys(bundle, max_states=self.env.max_states, timeout=self.env.timeout)
        self.env.set_numsys(bundle)
        self.emit(f"numeration system {bundle.name}: all checks passed")

    def cmd_load_linrep(self, name, path):
        r = en.read_linrep(path)
        self._store(name, r)
        self.emit(f"{name}: linear representation of rank {r.rank}")

    def cmd_export_dot(self, name, path):
        a = self.get(name, Dfa)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(au.to_dot(a, name))

    def cmd_save(self, name, path):
        value = self.get(name)
        if isinstance(value, en.LinearRepresentation):
            en.write_linrep(value, path)
        else:
            au.write_file(value, path)

    def cmd_run(self, path):
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        code = run_script(self, text, source=path)
        if code != EXIT_OK:
            raise _ScriptFailed(code)

    def _universes(self):
        u = self.env.universe
        return {u.name: u}

    # dispatch --------------------------------------------------------------------

    def execute(self, line: str):
        try:
            argv = shlex.split(line, comments=True)
        except ValueError as exc:
            raise CommandError(f"cannot split command: {exc}") from None
        if not argv:
            return
        cmd, args = argv[0], argv[1:]
        handler = getattr(self, "cmd_" + cmd.replace("-", "_"), None)
        if handler is None or cmd not in COMMANDS:
            raise CommandError(f"unknown command {cmd!r}")
        lo, hi = COMMANDS[cmd]
        if not lo <= len(args) <= hi:
            raise CommandError(f"{cmd} takes {lo if lo == hi else f'{lo}-{hi}'} arguments")
        handler(*args)


COMMANDS = {
    "eval": (2, 2), "count": (3, 3), "value": (2, 2), "monoid": (1, 2), "range": (1, 1),
    "load-word": (2, 2), "load-relation": (2, 2), "load-numsys": (1, 1),
    "load-linrep": (2, 2), "export-dot": (2, 2), "save": (2, 2), "run": (1, 1),
}


class _ScriptFailed(Exception):
    def __init__(self, code):
        self.code = code


def _int(text):
    try:
        return int(text)
    except ValueError:
        raise CommandError(f"expected an integer, got {text!r}") from None


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, _ScriptFailed):
        return exc.code
    if isinstance(exc, ResourceExhausted):
        return EXIT_RESOURCE
    if isinstance(exc, OSError):
        return EXIT_IO
    return EXIT_LOGIC


def summarize(dfa: Dfa, env: CompileEnv) -> str:
    """One-line description of a compiled result."""
    n = dfa.num_states
    if dfa.num_tracks == 0:
        return "true" if dfa.accepting[dfa.initial] else "false"
    tracks = ",".join(dfa.tracks)
    if au.is_finite(dfa):
        words = au.enumerate_words(dfa, n)
        vals = [tuple(env.numsys.decode(w.track(i)) for i in range(dfa.num_tracks))
                for w in words]
        vals.sort()
        shown = [str(v[0]) if len(v) == 1 else "(" + ",".join(map(str, v)) + ")"
                 for v in vals[:_LIST_LIMIT]]
        more = f", ... ({len(vals)} in all)" if len(vals) > _LIST_LIMIT else ""
        return f"{n} states, finite over ({tracks}): {{{', '.join(shown)}{more}}}"
    if n <= 8:
        return f"{n} states over ({tracks}), language {au.to_regex(dfa)}"
    return f"{n} states over ({tracks}), infinite language"


def run_script(session: Session, text: str, source: str = "<batch>", err=None) -> int:
    """Run lines in order, stopping at the first failure."""
    err = err or sys.stderr
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            session.execute(line)
        except _ScriptFailed as exc:
            return exc.code
        except (FibautoError, OSError) as exc:
            print(f"{source}:{lineno}: {line.strip()}: {_describe(exc)}", file=err)
            return exit_code(exc)
    return EXIT_OK


def _describe(exc):
    if isinstance(exc, ResourceExhausted):
        return f"resource limit: {exc} (undecided, not false)"
    return f"{type(exc).__name__}: {exc}"


def repl(session: Session, stdin=None, err=None):
    stdin = stdin or sys.stdin
    err = err or sys.stderr
    interactive = stdin.isatty()
    while True:
        if interactive:
            print("fibauto> ", end="", file=session.out, flush=True)
        line = stdin.readline()
        if not line:
            break
        if line.strip() in ("quit", "exit"):
            break
        try:
            session.execute(line)
        except _ScriptFailed:
            pass
        except (FibautoError, OSError) as exc:
            print(f"error: {_describe(exc)}", file=err)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="fibauto", description="Decide first-order predicates "
                                "over Fibonacci-automatic words.")
    p.add_argument("--batch", metavar="FILE", help="run commands from FILE and exit")
    p.add_argument("--max-states", type=int, default=2_000_000, help="state cap per compile")
    p.add_argument("--timeout", type=float, default=None,
                   help=f"seconds per compile (batch default {BATCH_TIMEOUT:.0f})")
    p.add_argument("--numsys", default="fib", help="numeration bundle file, or 'fib'")
    p.add_argument("--log", metavar="FILE", help="append compile logs to FILE")
    p.add_argument("--quiet", action="store_true", help="do not print compile logs")
    return p


def main(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    args = build_parser().parse_args(argv)
    stderr = stderr or sys.stderr
    timeout = args.timeout if args.timeout is not None else (BATCH_TIMEOUT if args.batch else None)
    log_file = None
    try:
        if args.log:
            log_file = open(args.log, "a", encoding="utf-8")
        session = Session(CompileEnv(max_states=args.max_states, timeout=timeout),
                          out=stdout, quiet=args.quiet, log_file=log_file)
        if args.numsys != "fib":
            try:
                session.cmd_load_numsys(args.numsys)
            except (FibautoError, OSError) as exc:
                print(f"--numsys {args.numsys}: {_describe(exc)}", file=stderr)
                return exit_code(exc)
        if args.batch:
            try:
                with open(args.batch, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                print(f"{args.batch}: {exc}", file=stderr)
                return EXIT_IO
            return run_script(session, text, source=args.batch, err=stderr)
        return repl(session, stdin, stderr)
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_IO
    finally:
        if log_file is not None:
            log_file.close()


if __name__ == "__main__":
    sys.exit(main())
