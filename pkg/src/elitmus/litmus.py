"""Litmus-test model, parser, pretty-printer and linter for ``.elitmus`` files.

A test file is line oriented::

    @expect default=forbid sea_r=forbid
    name: MP+dmb+ctrlsvc
    init: *x=0; *y=0; 0:X1=x; 0:X3=y; 1:X1=y; 1:X3=x
    thread 0:
      MOV X0,#1
      STR X0,[X1]
      ...
    handler 1:
      LDR X2,[X3]
      ERET
    inject 1 at L0: IRQ
    final exists: 1:X0=1 /\\ 1:X2=0

``//`` starts a comment. ``@`` lines are annotations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

NREGS = 31
LOC_BASE = 0x1000
LOC_STRIDE = 0x100

SYSREGS = (
    "ESR_EL1", "ELR_EL1", "VBAR_EL1", "TPIDR_EL1",
    "ICC_SGI1R_EL1", "IAR", "EOIR", "DIR", "DAIFSet", "DAIFClr",
)
SYSREG_ALIASES = {
    "ICC_IAR1_EL1": "IAR",
    "ICC_EOIR1_EL1": "EOIR",
    "ICC_DIR_EL1": "DIR",
    "SGI1R": "ICC_SGI1R_EL1",
    "DAIFSET": "DAIFSet",
    "DAIFCLR": "DAIFClr",
}
GIC_SYSREGS = frozenset({"ICC_SGI1R_EL1", "IAR", "EOIR", "DIR"})
# Priority registers are recognised so that tests using them fail loudly.
RESERVED_RE = re.compile(r"^(GICR_IPRIORITYR\d*|GICD_IPRIORITYR\d*|ICC_PMR_EL1|ICC_BPR1_EL1)$")

BARRIER_KINDS = {"LD": "LD", "ST": "ST", "SY": "SY", "ISH": "SY", "ISHLD": "LD", "ISHST": "ST"}
CONDITIONS = ("EQ", "NE")
THREAD_KEYS = {"PSTATE.EL": (0, 1), "EOIMODE": (0, 1)}
VARIANT_FLAGS = ("default", "exs", "eis", "eos", "sea_r", "sea_w", "sea_rw",
                 "no_ets2", "eoimode0", "eoimode1", "gic")
OUTCOMES = ("allow", "forbid", "unknown")


# operands ------------------------------------------------------------------


@dataclass(frozen=True)
class Reg:
    n: int


@dataclass(frozen=True)
class Imm:
    v: int


@dataclass(frozen=True)
class LabelRef:
    name: str


@dataclass(frozen=True)
class SysReg:
    name: str


@dataclass(frozen=True)
class Mem:
    base: int
    index: int | None = None
    offset: int = 0
    post: int | None = None  # post-index writeback amount


Operand = Union[Reg, Imm, LabelRef, SysReg, Mem, str]


@dataclass(frozen=True)
class Instruction:
    op: str
    args: tuple = ()
    label: str | None = None
    fault: bool = False
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return format_instruction(self)


# final condition -----------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    tid: int | None  # None for a memory atom
    name: str  # register "X3" or location name
    value: int | str

    def __str__(self) -> str:
        lhs = f"{self.tid}:{self.name}" if self.tid is not None else self.name
        return f"{lhs}={_fmt_value(self.value)}"


@dataclass(frozen=True)
class And:
    items: tuple


@dataclass(frozen=True)
class Or:
    items: tuple


@dataclass(frozen=True)
class Not:
    item: object


@dataclass(frozen=True)
class TrueCond:
    pass


FinalCondition = Union[Atom, And, Or, Not, TrueCond]


@dataclass(frozen=True)
class Injection:
    tid: int
    label: str
    kind: str = "IRQ"


@dataclass
class LitmusTest:
    name: str
    init_mem: dict[str, int] = field(default_factory=dict)
    init_regs: dict[tuple[int, int], int | str] = field(default_factory=dict)
    thread_config: dict[tuple[int, str], int] = field(default_factory=dict)
    threads: dict[int, tuple[Instruction, ...]] = field(default_factory=dict)
    handlers: dict[int, tuple[Instruction, ...]] = field(default_factory=dict)
    injections: tuple[Injection, ...] = ()
    final: FinalCondition = field(default_factory=TrueCond)
    final_kind: str = "exists"
    expect: dict[str, str] = field(default_factory=dict)

    @property
    def thread_ids(self) -> list[int]:
        return sorted(self.threads)

    def locations(self) -> list[str]:
        """Every location name, in first-mention order."""
        seen: dict[str, None] = {}
        for loc in self.init_mem:
            seen.setdefault(loc)
        for v in self.init_regs.values():
            if isinstance(v, str):
                seen.setdefault(v)
        for a in atoms(self.final):
            if a.tid is None:
                seen.setdefault(a.name)
            if isinstance(a.value, str):
                seen.setdefault(a.value)
        return list(seen)

    def addresses(self) -> dict[str, int]:
        return {loc: LOC_BASE + LOC_STRIDE * i for i, loc in enumerate(self.locations())}

    def eoimode(self, tid: int) -> int | None:
        return self.thread_config.get((tid, "EOIMODE"))

    def uses_gic(self) -> bool:
        for prog in list(self.threads.values()) + list(self.handlers.values()):
            for ins in prog:
                if ins.op in ("MSR", "MRS") and any(
                    isinstance(a, SysReg) and a.name in GIC_SYSREGS for a in ins.args
                ):
                    return True
        return False

    def expectation(self, variant: str) -> str | None:
        if variant in self.expect:
            return self.expect[variant]
        if variant == "default" and self.final_kind == "forbidden":
            return "forbid"
        return None


def atoms(c: FinalCondition):
    if isinstance(c, Atom):
        yield c
    elif isinstance(c, (And, Or)):
        for i in c.items:
            yield from atoms(i)
    elif isinstance(c, Not):
        yield from atoms(c.item)


# diagnostics ---------------------------------------------------------------


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.code}: {self.message}"


class ParseError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class _Fail(Exception):
    def __init__(self, code: str, message: str, col: int = 0):
        self.code, self.message, self.col = code, message, col


# instruction syntax --------------------------------------------------------

_INT_RE = r"-?(?:0x[0-9a-fA-F]+|\d+)"
_REG_RE = re.compile(r"^[XW](\d+)$", re.I)
_LABEL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.]*$")


def _parse_int(s: str) -> int:
    s = s.strip()
    if not re.fullmatch(_INT_RE, s):
        raise _Fail("syntax", f"bad integer {s!r}")
    v = int(s, 0)
    if not 0 <= v < 1 << 64:
        raise _Fail("syntax", f"value {s} outside 64-bit unsigned range")
    return v


def _reg(s: str) -> Reg:
    m = _REG_RE.match(s.strip())
    if not m:
        raise _Fail("unknown-register", f"not a general-purpose register: {s.strip()!r}")
    n = int(m.group(1))
    if n >= NREGS:
        raise _Fail("unknown-register", f"register index out of range: {s.strip()}")
    return Reg(n)


def _imm(s: str) -> Imm:
    s = s.strip()
    if not s.startswith("#"):
        raise _Fail("syntax", f"expected immediate, got {s!r}")
    return Imm(_parse_int(s[1:]))


def _reg_or_imm(s: str) -> Reg | Imm:
    return _imm(s) if s.strip().startswith("#") else _reg(s)


def _label(s: str) -> LabelRef:
    s = s.strip()
    if not _LABEL_RE.match(s):
        raise _Fail("syntax", f"bad label {s!r}")
    return LabelRef(s)


def _sysreg(s: str) -> SysReg:
    s = s.strip()
    if RESERVED_RE.match(s):
        raise _Fail("reserved-register", f"{s} is reserved: interrupt priority is not modelled")
    name = SYSREG_ALIASES.get(s, SYSREG_ALIASES.get(s.upper(), s))
    if name not in SYSREGS:
        raise _Fail("unknown-register", f"unknown system register {s!r}")
    return SysReg(name)


_MEM_RE = re.compile(r"^\[\s*([^\],]+)\s*(?:,\s*([^\]]+?)\s*)?\](?:\s*,\s*(#\S+))?$")


def _mem(s: str) -> Mem:
    m = _MEM_RE.match(s.strip())
    if not m:
        raise _Fail("syntax", f"bad memory operand {s.strip()!r}")
    base = _reg(m.group(1)).n
    index, offset = None, 0
    if m.group(2):
        second = m.group(2)
        if second.startswith("#"):
            offset = _imm(second).v
        else:
            index = _reg(second).n
    post = _imm(m.group(3)).v if m.group(3) else None
    return Mem(base, index, offset, post)


def _split_operands(s: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out


def _arity(op: str, ops: list[str], *allowed: int) -> None:
    if len(ops) not in allowed:
        raise _Fail("arity", f"{op} takes {' or '.join(map(str, allowed))} operands, got {len(ops)}")


def parse_instruction(text: str, line: int = 0) -> Instruction:
    label = None
    text = text.strip()
    m = re.match(r"^([A-Za-z_][A-Za-z0-9_.]*)\s*:\s*(.*)$", text)
    if m and not _REG_RE.match(m.group(1)):
        label, text = m.group(1), m.group(2).strip()
    if not text:
        raise _Fail("syntax", "label without instruction")
    fault = False
    if text.endswith("!fault"):
        fault = True
        text = text[: -len("!fault")].rstrip()
    parts = text.split(None, 1)
    op = parts[0].upper()
    ops = _split_operands(parts[1]) if len(parts) > 1 else []

    if op == "MOV":
        _arity(op, ops, 2, 3)
        src = _reg_or_imm(ops[1])
        if len(ops) == 3:
            sm = re.fullmatch(r"LSL\s+#(\d+)", ops[2].strip(), re.I)
            if not sm or not isinstance(src, Imm):
                raise _Fail("syntax", "only MOV Xd,#imm,LSL #n is supported")
            src = Imm((src.v << int(sm.group(1))) & ((1 << 64) - 1))
        args = (_reg(ops[0]), src)
    elif op in ("ADD", "SUB", "AND", "ORR", "EOR"):
        _arity(op, ops, 3)
        args = (_reg(ops[0]), _reg(ops[1]), _reg_or_imm(ops[2]))
    elif op == "CMP":
        _arity(op, ops, 2)
        args = (_reg(ops[0]), _reg_or_imm(ops[1]))
    elif op == "B":
        _arity(op, ops, 1)
        args = (_label(ops[0]),)
    elif op.startswith("B."):
        if op[2:] not in CONDITIONS:
            raise _Fail("unknown-mnemonic", f"unsupported condition {op}")
        _arity(op, ops, 1)
        args = (_label(ops[0]),)
    elif op in ("CBZ", "CBNZ"):
        _arity(op, ops, 2)
        args = (_reg(ops[0]), _label(ops[1]))
    elif op in ("LDR", "LDAR", "LDAPR", "LDXR", "LDAXR"):
        _arity(op, ops, 2, 3)
        if len(ops) == 3:  # post-index: LDR Xt,[Xn],#imm
            ops = [ops[0], ops[1] + "," + ops[2]]
        args = (_reg(ops[0]), _mem(ops[1]))
    elif op in ("STR", "STLR"):
        _arity(op, ops, 2, 3)
        if len(ops) == 3:
            ops = [ops[0], ops[1] + "," + ops[2]]
        args = (_reg(ops[0]), _mem(ops[1]))
    elif op in ("STXR", "STLXR"):
        _arity(op, ops, 3)
        args = (_reg(ops[0]), _reg(ops[1]), _mem(ops[2]))
    elif op in ("DMB", "DSB"):
        _arity(op, ops, 1)
        kind = BARRIER_KINDS.get(ops[0].upper())
        if kind is None:
            raise _Fail("syntax", f"unknown barrier option {ops[0]!r}")
        args = (kind,)
    elif op in ("ISB", "NOP", "ERET"):
        _arity(op, ops, 0)
        args = ()
    elif op == "SVC":
        _arity(op, ops, 1)
        args = (_imm(ops[0]),)
    elif op == "MRS":
        _arity(op, ops, 2)
        args = (_reg(ops[0]), _sysreg(ops[1]))
    elif op == "MSR":
        _arity(op, ops, 2)
        sr = _sysreg(ops[0])
        if sr.name in ("DAIFSet", "DAIFClr"):
            args = (sr, _imm(ops[1]))
        else:
            args = (sr, _reg(ops[1]))
    else:
        raise _Fail("unknown-mnemonic", f"unknown mnemonic {parts[0]!r}")

    if fault and not any(isinstance(a, Mem) for a in args):
        raise _Fail("syntax", "!fault applies only to memory accesses")
    return Instruction(op, args, label, fault, line)


def _fmt_value(v: int | str) -> str:
    return v if isinstance(v, str) else str(v)


def _fmt_operand(a) -> str:
    if isinstance(a, Reg):
        return f"X{a.n}"
    if isinstance(a, Imm):
        return f"#{a.v}" if a.v < 4096 else f"#{a.v:#x}"
    if isinstance(a, LabelRef):
        return a.name
    if isinstance(a, SysReg):
        return a.name
    if isinstance(a, Mem):
        inner = f"X{a.base}"
        if a.index is not None:
            inner += f",X{a.index}"
        elif a.offset:
            inner += f",#{a.offset}"
        s = f"[{inner}]"
        if a.post is not None:
            s += f",#{a.post}"
        return s
    return str(a)


def format_instruction(ins: Instruction) -> str:
    body = ins.op
    if ins.args:
        body += " " + ",".join(_fmt_operand(a) for a in ins.args)
    if ins.fault:
        body += " !fault"
    return f"{ins.label}: {body}" if ins.label else body


# final-condition syntax ----------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(/\\|\\/|~|\(|\)|,|true\b|[^\s()~,/\\]+)")
_ATOM_RE = re.compile(r"^(?:(\d+):)?([A-Za-z_*][A-Za-z0-9_.]*)=(.+)$")


def parse_condition(text: str) -> FinalCondition:
    text = text.strip()
    if not text:
        return TrueCond()
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise _Fail("syntax", f"bad final condition near {text[pos:]!r}", pos)
        toks.append((m.group(1), m.start(1)))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    i = 0

    def peek():
        return toks[i][0] if i < len(toks) else None

    def take():
        nonlocal i
        t = toks[i]
        i += 1
        return t

    def disj():
        items = [conj()]
        while peek() == "\\/":
            take()
            items.append(conj())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def conj():
        items = [unary()]
        while peek() in ("/\\", ","):
            take()
            items.append(unary())
        return items[0] if len(items) == 1 else And(tuple(items))

    def unary():
        t = peek()
        if t is None:
            raise _Fail("syntax", "unexpected end of final condition", len(text))
        if t == "~":
            take()
            return Not(unary())
        if t == "(":
            take()
            e = disj()
            if peek() != ")":
                raise _Fail("syntax", "missing ')' in final condition", len(text))
            take()
            return e
        if t == "true":
            take()
            return TrueCond()
        tok, col = take()
        m = _ATOM_RE.match(tok)
        if not m:
            raise _Fail("syntax", f"bad atom {tok!r}", col)
        tid = int(m.group(1)) if m.group(1) is not None else None
        name = m.group(2).lstrip("*")
        if tid is not None:
            name = f"X{_reg(name).n}"
        raw = m.group(3)
        value: int | str = raw if _LABEL_RE.match(raw) and not raw[0].isdigit() else _parse_int(raw)
        return Atom(tid, name, value)

    e = disj()
    if i != len(toks):
        raise _Fail("syntax", f"trailing tokens in final condition: {toks[i][0]!r}", toks[i][1])
    return e


def format_condition(c: FinalCondition, top: bool = True) -> str:
    if isinstance(c, TrueCond):
        return "" if top else "true"
    if isinstance(c, Atom):
        return str(c)
    if isinstance(c, Not):
        return "~" + format_condition(c.item, False)
    sep = " /\\ " if isinstance(c, And) else " \\/ "
    inner = sep.join(format_condition(i, False) for i in c.items)
    return inner if top else f"({inner})"


# whole-file parsing --------------------------------------------------------

_SECTION_RE = re.compile(r"^(thread|handler)\s+(\d+)\s*:\s*$", re.I)
_INJECT_RE = re.compile(r"^inject\s+(\d+)\s+at\s+([A-Za-z_][A-Za-z0-9_.]*)\s*:\s*(\w+)\s*$", re.I)
_FINAL_RE = re.compile(r"^final\s+(exists|forbidden)\s*:(.*)$", re.I)


def _parse_init(text: str, test: LitmusTest, line: int) -> None:
    for raw in text.split(";"):
        item = raw.strip()
        if not item:
            continue
        if "=" not in item:
            raise _Fail("syntax", f"bad init item {item!r}")
        lhs, rhs = (s.strip() for s in item.split("=", 1))
        if ":" in lhs:
            tid_s, key = lhs.split(":", 1)
            if not tid_s.isdigit():
                raise _Fail("syntax", f"bad thread id in {item!r}")
            tid = int(tid_s)
            if RESERVED_RE.match(key):
                raise _Fail("reserved-register", f"{key} is reserved: interrupt priority is not modelled")
            if key.upper() in THREAD_KEYS:
                v = _parse_int(rhs)
                if v not in THREAD_KEYS[key.upper()]:
                    raise _Fail("syntax", f"{key} must be one of {THREAD_KEYS[key.upper()]}")
                test.thread_config[(tid, key.upper())] = v
            else:
                reg = _reg(key).n
                test.init_regs[(tid, reg)] = rhs if _LABEL_RE.match(rhs) and not rhs[0].isdigit() else _parse_int(rhs)
        else:
            loc = lhs.lstrip("*").strip()
            if not _LABEL_RE.match(loc):
                raise _Fail("syntax", f"bad location {lhs!r}")
            test.init_mem[loc] = _parse_int(rhs)


def _parse_expect(text: str) -> dict[str, str]:
    out = {}
    for item in text.split():
        if "=" not in item:
            raise _Fail("syntax", f"bad @expect item {item!r}")
        k, v = item.split("=", 1)
        flags = k.lower().split("+")
        if any(f not in VARIANT_FLAGS for f in flags):
            raise _Fail("syntax", f"unknown variant {k!r}")
        if v.lower() not in OUTCOMES:
            raise _Fail("syntax", f"unknown outcome {v!r}")
        out["+".join(flags)] = v.lower()
    return out


def _parse(text: str) -> LitmusTest:
    test = LitmusTest(name="")
    diags: list[Diagnostic] = []
    section: tuple[str, int] | None = None
    progs: dict[tuple[str, int], list[Instruction]] = {}
    injections: list[Injection] = []
    seen_final = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        col = len(line) - len(line.lstrip()) + 1
        try:
            if stripped.startswith("@"):
                word, _, rest = stripped[1:].partition(" ")
                if word.lower() == "expect":
                    test.expect.update(_parse_expect(rest))
                else:
                    raise _Fail("syntax", f"unknown annotation @{word}")
                continue
            low = stripped.lower()
            if low.startswith("name:"):
                test.name = stripped[5:].strip()
                section = None
            elif low.startswith("init:"):
                _parse_init(stripped[5:], test, lineno)
                section = None
            elif m := _SECTION_RE.match(stripped):
                section = (m.group(1).lower(), int(m.group(2)))
                if section in progs:
                    raise _Fail("duplicate-section", f"{section[0]} {section[1]} declared twice")
                progs[section] = []
            elif m := _INJECT_RE.match(stripped):
                if m.group(3).upper() != "IRQ":
                    raise _Fail("syntax", f"unsupported injection kind {m.group(3)!r}")
                injections.append(Injection(int(m.group(1)), m.group(2), "IRQ"))
                section = None
            elif m := _FINAL_RE.match(stripped):
                if seen_final:
                    raise _Fail("syntax", "more than one final clause")
                seen_final = True
                test.final_kind = m.group(1).lower()
                test.final = parse_condition(m.group(2))
                section = None
            elif section is not None:
                progs[section].append(parse_instruction(stripped, lineno))
            else:
                raise _Fail("syntax", f"unexpected line {stripped!r}")
        except _Fail as f:
            diags.append(Diagnostic(f.code, f.message, lineno, col + f.col))
    if not test.name:
        diags.append(Diagnostic("syntax", "missing name:", 1, 1))
    if diags:
        raise ParseError(diags)
    for (kind, tid), prog in progs.items():
        (test.threads if kind == "thread" else test.handlers)[tid] = tuple(prog)
    test.threads = dict(sorted(test.threads.items()))
    test.handlers = dict(sorted(test.handlers.items()))
    test.injections = tuple(injections)
    return test


def parse_test(text: str) -> LitmusTest:
    """Parse and lint a test; raise ParseError with every diagnostic found."""
    test = _parse(text)
    diags = validate_test(test)
    if diags:
        raise ParseError(diags)
    return test


def load_test(path) -> LitmusTest:
    with open(path, encoding="utf-8") as f:
        return parse_test(f.read())


# validation ----------------------------------------------------------------


def _labels(prog) -> dict[str, list[Instruction]]:
    out: dict[str, list[Instruction]] = {}
    for ins in prog:
        if ins.label:
            out.setdefault(ins.label, []).append(ins)
    return out


def _used_regs(prog) -> set[int]:
    regs = set()
    for ins in prog:
        for a in ins.args:
            if isinstance(a, Reg):
                regs.add(a.n)
            elif isinstance(a, Mem):
                regs.add(a.base)
                if a.index is not None:
                    regs.add(a.index)
    return regs


def validate_test(test: LitmusTest) -> list[Diagnostic]:
    """Check the structural invariants; an empty list means the test is valid."""
    diags: list[Diagnostic] = []
    if not test.threads:
        diags.append(Diagnostic("no-threads", "test has no threads"))
    for tid in test.handlers:
        if tid not in test.threads:
            diags.append(Diagnostic("unknown-thread", f"handler {tid} has no thread {tid}"))
    for tid, prog in test.threads.items():
        handler = test.handlers.get(tid, ())
        main_labels, h_labels = _labels(prog), _labels(handler)
        for name, where in list(main_labels.items()) + list(h_labels.items()):
            if len(where) > 1:
                diags.append(Diagnostic("duplicate-label", f"label {name} defined twice in thread {tid}", where[1].line))
        for name in set(main_labels) & set(h_labels):
            diags.append(Diagnostic("duplicate-label", f"label {name} defined in both thread {tid} and its handler",
                                    h_labels[name][0].line))
        for part, labels in ((prog, main_labels), (handler, h_labels)):
            for ins in part:
                for a in ins.args:
                    if isinstance(a, LabelRef) and a.name not in labels:
                        diags.append(Diagnostic("unknown-label", f"branch to unknown label {a.name} in thread {tid}",
                                                ins.line))
        needs = [ins for ins in prog + handler if ins.op == "SVC" or ins.fault]
        if needs and tid not in test.handlers:
            diags.append(Diagnostic("missing-handler",
                                    f"thread {tid} raises exceptions ({needs[0].op}) but has no handler",
                                    needs[0].line))
    for inj in test.injections:
        if inj.tid not in test.threads:
            diags.append(Diagnostic("unknown-thread", f"injection into unknown thread {inj.tid}"))
            continue
        labels = _labels(test.threads[inj.tid]) | _labels(test.handlers.get(inj.tid, ()))
        if inj.label not in labels:
            diags.append(Diagnostic("unknown-label", f"injection at unknown label {inj.label} in thread {inj.tid}"))
        if inj.tid not in test.handlers:
            diags.append(Diagnostic("missing-handler", f"injection into thread {inj.tid}, which has no handler"))
    seen_inj = set()
    for inj in test.injections:
        if (inj.tid, inj.label) in seen_inj:
            diags.append(Diagnostic("duplicate-injection", f"injection {inj.tid} at {inj.label} declared twice"))
        seen_inj.add((inj.tid, inj.label))
    for (tid, _), _v in list(test.init_regs.items()):
        if tid not in test.threads:
            diags.append(Diagnostic("unknown-thread", f"init refers to unknown thread {tid}"))
    for (tid, _k) in test.thread_config:
        if tid not in test.threads:
            diags.append(Diagnostic("unknown-thread", f"init refers to unknown thread {tid}"))
    declared_locs = set(test.init_mem) | {v for v in test.init_regs.values() if isinstance(v, str)}
    for a in atoms(test.final):
        if a.tid is None:
            if a.name not in declared_locs:
                diags.append(Diagnostic("unknown-location", f"final condition uses undeclared location {a.name}"))
        else:
            if a.tid not in test.threads:
                diags.append(Diagnostic("unknown-thread", f"final condition uses unknown thread {a.tid}"))
                continue
            used = _used_regs(test.threads[a.tid] + test.handlers.get(a.tid, ()))
            used |= {r for (t, r) in test.init_regs if t == a.tid}
            if int(a.name[1:]) not in used:
                diags.append(Diagnostic("unknown-register", f"final condition uses register {a.tid}:{a.name} "
                                                            "that the thread never mentions"))
        if isinstance(a.value, str) and a.value not in declared_locs:
            diags.append(Diagnostic("unknown-location", f"final condition uses undeclared location {a.value}"))
    return diags


# pretty-printing -----------------------------------------------------------


def format_test(test: LitmusTest) -> str:
    lines = []
    if test.expect:
        lines.append("@expect " + " ".join(f"{k}={v}" for k, v in test.expect.items()))
    lines.append(f"name: {test.name}")
    init = [f"*{loc}={v}" for loc, v in test.init_mem.items()]
    init += [f"{tid}:{key}={v}" for (tid, key), v in test.thread_config.items()]
    init += [f"{tid}:X{r}={_fmt_value(v)}" for (tid, r), v in test.init_regs.items()]
    if init:
        lines.append("init: " + "; ".join(init))
    for tid, prog in test.threads.items():
        lines.append(f"thread {tid}:")
        lines += [f"  {format_instruction(i)}" for i in prog]
        if tid in test.handlers:
            lines.append(f"handler {tid}:")
            lines += [f"  {format_instruction(i)}" for i in test.handlers[tid]]
    for inj in test.injections:
        lines.append(f"inject {inj.tid} at {inj.label}: {inj.kind}")
    lines.append(f"final {test.final_kind}: {format_condition(test.final)}".rstrip())
    return "\n".join(lines) + "\n"
