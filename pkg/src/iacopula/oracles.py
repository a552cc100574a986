"""Model oracles: things that map a profile of marginals to a joint.

Anything callable as ``f(profile) -> JointPmf`` is a model oracle.  This
module supplies the copula-model oracle, an out-of-process oracle speaking a
line-delimited JSON protocol, and a small name registry used by the CLI.
"""

from __future__ import annotations

import json
import queue
import shlex
import subprocess
import threading
from typing import Callable, Dict, Protocol

from .copulas import CopulaSpec
from .couplings import MaximalCouplingModel
from .io import dumps
from .joint import JointPmf, build_joint
from .marginals import Profile, as_profile

QUERY_TIMEOUT = 30.0


class ModelOracle(Protocol):
    def __call__(self, p: Profile) -> JointPmf: ...


class OracleError(RuntimeError):
    """The oracle failed to answer a query."""


class CopulaModel:
    """The copula model of ``spec``: ``F_joint(s) = C(F_1(s_1), ..., F_n(s_n))``."""

    def __init__(self, spec, seed: int = 0):
        self.spec = spec
        self.seed = seed

    @property
    def name(self) -> str:
        return f"copula:{self.spec.name}"

    def __call__(self, p) -> JointPmf:
        return build_joint(self.spec, as_profile(p), seed=self.seed)

    def __repr__(self):
        return f"CopulaModel({self.spec!r})"


class SubprocessOracle:
    """Model living in another process.

    One request per line on the child's stdin, ``{"profile": [[...], ...]}``;
    one reply per line on its stdout, ``{"shape": [...], "mass": [...]}``.
    Each query times out after ``timeout`` seconds.
    """

    def __init__(self, command, timeout: float = QUERY_TIMEOUT):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self.name = "exec:" + " ".join(self.command)
        self._proc = None
        self._lines: "queue.Queue[str | None]" = queue.Queue()

    def _start(self):
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise OracleError(f"cannot start oracle {self.command!r}: {exc}") from None
        threading.Thread(target=self._pump, args=(self._proc.stdout,), daemon=True).start()

    def _pump(self, stream):
        for line in stream:
            self._lines.put(line)
        self._lines.put(None)

    def __call__(self, p) -> JointPmf:
        p = as_profile(p)
        if self._proc is None:
            self._start()
        try:
            self._proc.stdin.write(dumps({"profile": p.tolist()}) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError):
            raise OracleError(f"oracle {self.name} closed its input") from None
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            self.close()
            raise OracleError(f"oracle {self.name} timed out after {self.timeout} s") from None
        if line is None:
            raise OracleError(f"oracle {self.name} exited without answering")
        try:
            return JointPmf.from_dict(json.loads(line))
        except (json.JSONDecodeError, ValueError) as exc:
            raise OracleError(f"oracle {self.name} sent an invalid reply: {exc}") from None

    def close(self):
        if self._proc is not None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=1.0)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
            self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __del__(self):
        self.close()


_REGISTRY: Dict[str, Callable[[int], ModelOracle]] = {}


def register_model(name: str, factory: Callable[[int], ModelOracle]) -> None:
    """Register ``factory(n) -> oracle`` under ``name`` for :func:`get_model`."""
    _REGISTRY[name] = factory


def available_models() -> list:
    return sorted(_REGISTRY)


def get_model(name: str, n: int = 2) -> ModelOracle:
    """Look up a named oracle for ``n`` marginals, or ``exec:<command>``."""
    if name.startswith("exec:"):
        return SubprocessOracle(name[len("exec:"):])
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown model {name!r}; known: {available_models()} or exec:<command>") from None
    return factory(n)


register_model("independence", lambda n: CopulaModel(CopulaSpec.independence(n)))
register_model("frechet-upper", lambda n: CopulaModel(CopulaSpec.frechet_upper(n)))
register_model("maximal-coupling", lambda n: MaximalCouplingModel())
