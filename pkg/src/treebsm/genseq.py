"""Matter-qubit instruction sequences that grow a logical Bell pair.

A pair of tree codes entangled at the logical level is produced by a small
register of matter qubits: two root registers (one per tree) plus one
ladder register per tree level.  Each subtree is assembled on a ladder
register, bonded to its parent register with a CZ, and then teleported
into a freshly emitted photon by the emit/Hadamard/measure-Z idiom; leaves
are emitted directly by their parent's register.  Finally the two root
registers are bonded by a CZ and measured out in X, which carves both tree
codes and leaves them maximally entangled.

Conventions fixed here and relied on by the verifier:

* ``EmitPhoton`` creates a photon in ``|0>`` and entangles it with the
  emitter as ``(|00> + |11>)/sqrt(2)`` (a CNOT from the emitter).  The
  single-photon rotation that turns leaf copy-bonds into graph edges is
  deferred to the photon's detector; the verifier applies it (an H on each
  leaf photon) before comparing states.
* A measured matter register is reused by re-initializing a fresh ``|+>``
  qubit on its next use.
* The logical Bell pair produced by root-X measurements is the graph-type
  pair: its cross generators are (logical X) x (logical Z') and
  (logical Z) x (logical X'), together with both codes' stabilizers.  It
  is one logical Hadamard away from the parity-aligned pair; the verifier
  targets the state the sequence actually prepares.

For a branching vector of depth d the register count is d + 1 (two roots
sharing the d - 1 ladder registers); depth 1 needs just the two roots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .stabilizer import (
    PauliString,
    StabilizerTableau,
    graph_state_tableau,
    logical_x_string,
    logical_z_string,
    restricted_to,
    _gf2_solve,
)
from .trees import BranchingVectorLike, as_branching_vector, build_tree, photon_count


# ---------------------------------------------------------------------------
# Instructions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Instruction:
    """One matter-register operation.

    opcode: "E" (emit photon: args = (register, photon)), "H" (register),
    "MX" / "MY" / "MZ" (measure register), "CZ" (two registers).
    """

    opcode: str
    args: tuple[int, ...]

    def to_line(self) -> str:
        return " ".join([self.opcode, *map(str, self.args)])

    @classmethod
    def from_line(cls, line: str) -> "Instruction":
        parts = line.split()
        return cls(parts[0], tuple(int(x) for x in parts[1:]))


@dataclass
class InstructionSequence:
    """Ordered matter-qubit program (execution order = list order).

    ``photon_vertex[p]`` records which tree vertex the p-th photon
    realizes, as ``(tree index, vertex id)`` with vertex ids from the
    breadth-first tree numbering.  Matter registers are numbered 0 (root
    of tree 0), 1 (root of tree 1), then 2.. for the shared ladder.
    """

    branching: tuple[int, ...]
    n_registers: int
    n_photons: int
    instructions: list[Instruction]
    photon_vertex: dict[int, tuple[int, int]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self) -> Iterator[Instruction]:
        return iter(self.instructions)

    @property
    def n_measurements(self) -> int:
        return sum(1 for ins in self.instructions if ins.opcode in ("MX", "MY", "MZ"))

    def to_text(self) -> str:
        return "\n".join(ins.to_line() for ins in self.instructions) + "\n"

    @classmethod
    def from_text(cls, text: str, branching: BranchingVectorLike) -> "InstructionSequence":
        ins = [Instruction.from_line(line) for line in text.strip().splitlines()]
        regs = 1 + max((max(i.args[:1 + (i.opcode == "CZ")]) for i in ins), default=0)
        photons = sum(1 for i in ins if i.opcode == "E")
        return cls(tuple(as_branching_vector(branching)), regs, photons, ins)


# ---------------------------------------------------------------------------
# Compiler
# ---------------------------------------------------------------------------

def compile_bell_pair(b: BranchingVectorLike) -> InstructionSequence:
    """Expand the full Bell-pair program for tree shape ``b``.

    Per tree: for each child subtree of a register-held node, first build
    the grandchild structure on the next ladder register, bond it with CZ,
    emit the node photon and teleport the register into it (H then MZ);
    leaves are plain emissions.  The second tree is grown first, then the
    first, then the two roots are bonded and measured in X.
    """
    vec = as_branching_vector(b)
    tree = build_tree(vec)
    ins: list[Instruction] = []
    photon_vertex: dict[int, tuple[int, int]] = {}
    counter = {"p": 0}

    def emit(reg: int, tree_id: int, vertex: int) -> None:
        p = counter["p"]
        counter["p"] += 1
        photon_vertex[p] = (tree_id, vertex)
        ins.append(Instruction("E", (reg, p)))

    def grow(reg: int, vertex: int, tree_id: int) -> None:
        # Attach every child subtree of `vertex` (held on register `reg`).
        level = tree.level[vertex]
        child_reg = 2 + level  # ladder register holding level-(level+1) nodes
        for child in tree.children[vertex]:
            if tree.level[child] == tree.depth:
                emit(reg, tree_id, child)
            else:
                grow(child_reg, child, tree_id)
                ins.append(Instruction("CZ", (reg, child_reg)))
                emit(child_reg, tree_id, child)
                ins.append(Instruction("H", (child_reg,)))
                ins.append(Instruction("MZ", (child_reg,)))

    grow(1, 0, 1)
    grow(0, 0, 0)
    ins.append(Instruction("CZ", (0, 1)))
    ins.append(Instruction("MX", (1,)))
    ins.append(Instruction("MX", (0,)))

    n_registers = 2 if vec.depth == 1 else vec.depth + 1
    return InstructionSequence(
        branching=tuple(vec),
        n_registers=n_registers,
        n_photons=counter["p"],
        instructions=ins,
        photon_vertex=photon_vertex,
    )


# ---------------------------------------------------------------------------
# Target state and verification
# ---------------------------------------------------------------------------

def logical_bell_tableau(b: BranchingVectorLike) -> StabilizerTableau:
    """Stabilizer group of the graph-type logical Bell pair of two tree codes.

    Qubits are ordered tree-0 vertices 1..n-1 (breadth first) followed by
    tree-1 vertices 1..n-1.  Generators: every K_u of either tree for u at
    level 2 or deeper, each code's first-level completion products, and
    the cross pair (X_L Z_L'), (Z_L X_L').
    """
    vec = as_branching_vector(b)
    tree = build_tree(vec)
    per = tree.n_vertices - 1  # photons per tree (root is matter-side)
    n = 2 * per

    def pos(tree_id: int, vertex: int) -> int:
        return tree_id * per + (vertex - 1)

    gens: list[PauliString] = []
    for tree_id in (0, 1):
        for u in range(1, tree.n_vertices):
            if tree.level[u] < 2:
                continue
            p = PauliString.identity(n)
            p.xs[pos(tree_id, u)] = True
            for w in tree.neighbors(u):
                p.zs[pos(tree_id, w)] = True
            gens.append(p)
        first_level = tree.children[0]
        lead = first_level[0]
        for other in first_level[1:]:
            p = PauliString.identity(n)
            for v in (lead, other):
                p.xs[pos(tree_id, v)] = True
                for w in tree.children[v]:
                    p.zs[pos(tree_id, w)] ^= True
            gens.append(p)

    # Cross generators: X_L Z_L' and Z_L X_L'.
    for a, bb in ((0, 1), (1, 0)):
        p = PauliString.identity(n)
        lead = tree.children[0][0]
        p.xs[pos(a, lead)] = True
        for w in tree.children[lead]:
            p.zs[pos(a, w)] = True
        for v in tree.children[0]:
            p.zs[pos(bb, v)] ^= True
        gens.append(p)
    return StabilizerTableau.from_generators(gens)


@dataclass
class VerifyResult:
    ok: bool
    n_registers: int
    n_photons: int
    correction: PauliString | None
    detail: str

    def __bool__(self) -> bool:
        return self.ok


def execute_sequence(
    seq: InstructionSequence,
    rng: np.random.Generator | None = None,
    forced_outcomes: list[int] | None = None,
) -> StabilizerTableau:
    """Run a sequence on the tableau engine; returns the photon-only state.

    Photons occupy tableau qubits 0..P-1 in emission order; matter
    registers are allocated on demand (fresh ``|+>`` per use) and are all
    destructively measured out by a complete program.  The deferred leaf
    rotation (H on each leaf photon) is applied before returning.
    """
    vec = as_branching_vector(seq.branching)
    depth = len(vec)
    t = StabilizerTableau(0)
    photon_q: dict[int, int] = {}
    for p in range(seq.n_photons):
        q = t.add_qubit("0")
        photon_q[p] = q
    reg_q: dict[int, int] = {}

    def reg(r: int) -> int:
        if r not in reg_q:
            reg_q[r] = t.add_qubit("+")
        return reg_q[r]

    outcomes = iter(forced_outcomes) if forced_outcomes is not None else None

    def next_outcome() -> int | None:
        if outcomes is None:
            return None
        return next(outcomes)

    for ins in seq.instructions:
        if ins.opcode == "E":
            r, p = ins.args
            t.apply_cnot(reg(r), photon_q[p])
        elif ins.opcode == "H":
            t.apply_h(reg(ins.args[0]))
        elif ins.opcode == "CZ":
            t.apply_cz(reg(ins.args[0]), reg(ins.args[1]))
        elif ins.opcode in ("MX", "MY", "MZ"):
            basis = ins.opcode[1]
            r = ins.args[0]
            t.measure(reg(r), basis, outcome=next_outcome(), rng=rng, destructive=True)
            del reg_q[r]  # next use re-initializes
        else:
            raise ValueError(f"unknown opcode {ins.opcode}")

    if reg_q:
        raise ValueError(f"registers never measured out: {sorted(reg_q)}")

    # Deferred single-photon rotation on the leaves.
    for p, (tree_id, vertex) in seq.photon_vertex.items():
        if _vertex_level(vec, vertex) == depth:
            t.apply_h(photon_q[p])

    # Reorder photons into (tree 0 BFS, tree 1 BFS) to match the target.
    per = photon_count(vec) - 1
    order = [None] * (2 * per)
    for p, (tree_id, vertex) in seq.photon_vertex.items():
        order[tree_id * per + (vertex - 1)] = photon_q[p]
    return restricted_to(t, order)


def _vertex_level(vec, vertex: int) -> int:
    size, start, level = 1, 0, 0
    while True:
        if vertex < start + size:
            return level
        start += size
        size *= vec[level]
        level += 1


def verify_bell_pair(
    seq: InstructionSequence,
    b: BranchingVectorLike,
    rng: np.random.Generator | None = None,
    forced_outcomes: list[int] | None = None,
) -> VerifyResult:
    """Execute a sequence and compare against the logical Bell pair.

    Measurement byproducts are only ever Pauli frames, so the executed
    group must match the target up to signs; the verifier solves for the
    Pauli correction realizing the sign pattern, applies it, and then
    requires exact signed equality.  On mismatch, the first differing
    canonical generator is reported.
    """
    vec = as_branching_vector(b)
    if tuple(vec) != tuple(seq.branching):
        raise ValueError("sequence was compiled for a different tree shape")
    if rng is None and forced_outcomes is None:
        forced_outcomes = [1] * seq.n_measurements

    state = execute_sequence(seq, rng=rng, forced_outcomes=forced_outcomes)
    target = logical_bell_tableau(vec)

    if state.n_generators != target.n_generators:
        return VerifyResult(
            False, seq.n_registers, seq.n_photons, None,
            f"rank mismatch: got {state.n_generators}, want {target.n_generators}",
        )

    # Unsigned group comparison first.
    cs, ct = state.canonical(), target.canonical()
    if not (np.array_equal(cs.xs, ct.xs) and np.array_equal(cs.zs, ct.zs)):
        for i in range(ct.n_generators):
            if not (
                np.array_equal(cs.xs[i], ct.xs[i]) and np.array_equal(cs.zs[i], ct.zs[i])
            ):
                return VerifyResult(
                    False, seq.n_registers, seq.n_photons, None,
                    f"unsigned group mismatch at canonical row {i}: "
                    f"got {cs.generator(i).to_label()}, want {ct.generator(i).to_label()}",
                )

    # Solve for the Pauli frame that fixes the sign defects.
    defects = (cs.phase != ct.phase).astype(np.uint8)
    a = np.hstack([ct.zs, ct.xs]).astype(np.uint8)  # commutation pairing matrix
    sol = _gf2_solve(a, defects, 2 * state.n)
    if sol is None:
        return VerifyResult(
            False, seq.n_registers, seq.n_photons, None,
            "no Pauli correction realizes the sign pattern",
        )
    corr = PauliString(sol[: state.n].astype(bool), sol[state.n:].astype(bool), 1)
    state.apply_pauli(corr)

    cs = state.canonical()
    if np.array_equal(cs.phase, ct.phase):
        return VerifyResult(True, seq.n_registers, seq.n_photons, corr, "ok")
    return VerifyResult(
        False, seq.n_registers, seq.n_photons, corr, "sign mismatch after correction"
    )
