"""Regenerate the bundled fixture kit under src/pgplan/fixtures/.

Domains are literal; problems are expanded from the layout tables below
so the files stay reproducible. Run from the repository root:

    python scripts/make_fixtures.py
"""

from __future__ import annotations

import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "src", "pgplan", "fixtures")

BLOCKSWORLD_DOM = """\
; Six-block world with one table. Shoving a block sideways onto a
; table-level block looks as cheap as a table move but buries the
; receiving block; restacking detours are legal but longer.
(defdomain blocksworld (
  (:predicate On 2)
  (:predicate OnTable 1)
  (:predicate Clear 1)
  (:predicate Space 1)
  (:predicate Holding 1)
  (:predicate HandEmpty 0)

  (:operator (put-on-table ?x ?y)
    ((On ?x ?y) (Clear ?x) (Space Table))
    ((On ?x ?y))
    ((OnTable ?x) (Clear ?y)))

  (:operator (pick-up ?x)
    ((OnTable ?x) (Clear ?x) (HandEmpty))
    ((OnTable ?x) (Clear ?x) (HandEmpty))
    ((Holding ?x)))

  (:operator (stack ?x ?z)
    ((Holding ?x) (Clear ?z))
    ((Holding ?x) (Clear ?z))
    ((On ?x ?z) (Clear ?x) (HandEmpty)))

  (:operator (shove ?x ?y ?z)
    ((On ?x ?y) (Clear ?x) (Clear ?z) (OnTable ?z))
    ((On ?x ?y) (Clear ?z))
    ((On ?x ?z) (Clear ?y)))

  (:method Done (Clear ?b)
    ((Clear ?b))
    ())

  (:method ShoveOff (Clear ?b)
    ((On ?x ?y) (Clear ?x) (Clear ?z) (OnTable ?z))
    ((shove ?x ?y ?z) (Clear ?b)))

  (:method PutOnTable (Clear ?b)
    ((On ?x ?y) (Clear ?x) (Space Table))
    ((put-on-table ?x ?y) (Clear ?b)))

  (:method StackonD (Clear ?b)
    ((On ?x ?y) (Clear ?x) (Clear D) (OnTable D))
    ((put-on-table ?x ?y) (pick-up ?x) (stack ?x D) (Clear ?b)))

  (:method StackonE (Clear ?b)
    ((On ?x ?y) (Clear ?x) (Clear E))
    ((put-on-table ?x ?y) (pick-up ?x) (stack ?x E) (Clear ?b)))

  (:method StackonF (Clear ?b)
    ((On ?x ?y) (Clear ?x) (Clear F) (OnTable F))
    ((put-on-table ?x ?y) (pick-up ?x) (stack ?x F) (Clear ?b)))
))
"""

# Stacks are written top block first; every block not listed sits alone
# on the table. Target is the block the problem must uncover.
BLOCKSWORLD_PROBLEMS = [
    ("bw-01", [["F", "A", "B"], ["E", "C"]], "B"),
    ("bw-02", [["A", "B"]], "B"),
    ("bw-03", [["E", "D", "C", "B"], ["A"]], "B"),
    ("bw-04", [["F", "E", "A", "B"]], "B"),
    ("bw-05", [["A", "C"], ["B"]], "C"),
    ("bw-06", [["B", "A"], ["D", "C"], ["F", "E"]], "A"),
    ("bw-07", [["C", "B", "A"], ["E", "D"]], "A"),
    ("bw-08", [["F", "D", "B"], ["E", "C", "A"]], "B"),
    ("bw-09", [["A", "B"], ["E", "C"]], "B"),
    ("bw-10", [["E", "F", "A", "B"], ["D", "C"]], "B"),
    ("bw-11", [["D", "A"], ["E", "B"], ["F", "C"]], "C"),
    ("bw-12", [["F", "B"], ["E", "A"], ["D", "C"]], "B"),
]

BLOCKS = ["A", "B", "C", "D", "E", "F"]

BLOCKSWORLD_ORACLE = """\
; Scripted expert for the block-clearing task. Rules fire in order,
; once each, so repeated queries walk through the advice.
(rule ((On ?x ?b)) (Clear ?b)
  (pref ClearByTableMoves ((On ?x ?b)) (Clear ?b)
    (:prefer PutOnTable) (:avoid ShoveOff StackonE))
  :max-uses 1)
(rule ((On ?x ?b) (Clear D) (OnTable D)) (Clear ?b)
  (pref AvoidRestackD ((On ?x ?b) (Clear D) (OnTable D)) (Clear ?b)
    (:prefer PutOnTable) (:avoid StackonD))
  :max-uses 1)
(rule ((On ?x ?b) (OnTable F) (Clear F)) (Clear ?b)
  (pref AvoidRestackF ((On ?x ?b) (OnTable F) (Clear F)) (Clear ?b)
    (:prefer PutOnTable) (:avoid StackonF))
  :max-uses 1)
(rule ((Clear ?b)) (Clear ?b)
  (pref FinishWhenClear ((Clear ?b)) (Clear ?b)
    (:prefer Done) (:avoid))
  :max-uses 1)
"""

BLOCKSWORLD_PREFS = """\
; Upfront advice written before seeing any run. Some of it pins down
; configurations the guided planner rarely visits.
(pref UpTableWhenFCovers ((On F ?b)) (Clear ?b)
  (:prefer PutOnTable) (:avoid ShoveOff StackonE))
(pref UpAvoidD ((On ?x ?b) (Clear D) (OnTable D)) (Clear ?b)
  (:prefer PutOnTable) (:avoid StackonD))
(pref UpFinish ((Clear ?b)) (Clear ?b)
  (:prefer Done) (:avoid))
(pref UpUnstackE ((On ?x E)) (Clear ?b)
  (:prefer PutOnTable) (:avoid))
"""

HANOI_DOM = """\
; Tower relocation with three pegs. Parking a blocker on the move's
; own target is legal but forces rework.
(defdomain hanoi (
  (:predicate On 2)
  (:predicate Clear 1)
  (:predicate Smaller 2)
  (:predicate Other 2)

  (:operator (move ?d ?from ?to)
    ((On ?d ?from) (Clear ?d) (Clear ?to) (Smaller ?d ?to))
    ((On ?d ?from) (Clear ?to))
    ((On ?d ?to) (Clear ?from)))

  (:method AlreadyThere (Move ?d ?to)
    ((On ?d ?to))
    ())

  (:method DirectMove (Move ?d ?to)
    ((On ?d ?from) (Clear ?d) (Clear ?to) (Smaller ?d ?to))
    ((move ?d ?from ?to)))

  (:method ParkOnTarget (Move ?d ?to)
    ((On ?x ?d) (Clear ?to) (Smaller ?x ?to))
    ((Move ?x ?to) (Move ?d ?to)))

  (:method ParkAside (Move ?d ?to)
    ((On ?x ?d) (Clear ?park) (Smaller ?x ?park) (Other ?park ?to))
    ((Move ?x ?park) (Move ?d ?to)))

  (:method UncoverTarget (Move ?d ?to)
    ((Clear ?d) (On ?y ?to) (Clear ?park) (Smaller ?y ?park)
     (Other ?park ?d) (Other ?park ?to))
    ((Move ?y ?park) (Move ?d ?to)))
))
"""

# (name, disk count, stacks top-first keyed by peg, task list, goal atoms)
HANOI_PROBLEMS = [
    ("hanoi-01", 3, {"P1": ["d1", "d2", "d3"]}, [("d3", "P3")], [("d3", "P3")]),
    ("hanoi-02", 3, {"P1": ["d1", "d2", "d3"]},
     [("d3", "P3"), ("d2", "d3"), ("d1", "d2")],
     [("d3", "P3"), ("d2", "d3"), ("d1", "d2")]),
    ("hanoi-03", 2, {"P1": ["d1", "d2"]},
     [("d2", "P2"), ("d1", "d2")], [("d2", "P2"), ("d1", "d2")]),
    ("hanoi-04", 3, {"P1": ["d1"], "P2": ["d2"], "P3": ["d3"]},
     [("d2", "d3"), ("d1", "d2")], [("d2", "d3"), ("d1", "d2")]),
    ("hanoi-05", 3, {"P1": ["d2"], "P2": ["d1", "d3"]},
     [("d3", "P1")], [("d3", "P1")]),
    ("hanoi-06", 3, {"P2": ["d1", "d2", "d3"]},
     [("d3", "P1"), ("d2", "d3")], [("d3", "P1"), ("d2", "d3")]),
    ("hanoi-07", 2, {"P1": ["d1"], "P3": ["d2"]},
     [("d2", "P1")], [("d2", "P1")]),
    ("hanoi-08", 3, {"P1": ["d1", "d3"], "P2": ["d2"]},
     [("d3", "P2")], [("d3", "P2")]),
    ("hanoi-09", 4, {"P1": ["d1", "d2", "d3", "d4"]},
     [("d4", "P2")], [("d4", "P2")]),
    ("hanoi-10", 3, {"P3": ["d1", "d2", "d3"]},
     [("d3", "P2"), ("d2", "d3"), ("d1", "d2")],
     [("d3", "P2"), ("d2", "d3"), ("d1", "d2")]),
    ("hanoi-11", 3, {"P1": ["d1", "d2"], "P2": ["d3"]},
     [("d2", "d3"), ("d1", "d2")], [("d2", "d3"), ("d1", "d2")]),
    ("hanoi-12", 4, {"P1": ["d2", "d4"], "P2": ["d3"], "P3": ["d1"]},
     [("d4", "P3"), ("d3", "d4")], [("d4", "P3"), ("d3", "d4")]),
]

HANOI_ORACLE = """\
; Scripted expert for tower moves. The first answer is anchored to the
; P1 tower the expert was looking at; asked again somewhere else, the
; expert generalizes the same advice to any covered disk.
(rule ((On ?x ?d) (On ?d P1)) (Move ?d ?to)
  (pref ParkAwayFromTarget ((On ?x ?d) (On ?d P1)) (Move ?d ?to)
    (:prefer ParkAside) (:avoid ParkOnTarget))
  :max-uses 1)
(rule ((On ?x ?d)) (Move ?d ?to)
  (pref ParkAsideAnywhere ((On ?x ?d)) (Move ?d ?to)
    (:prefer ParkAside) (:avoid ParkOnTarget))
  :max-uses 1)
(rule ((Clear ?d) (On ?y ?to)) (Move ?d ?to)
  (pref UncoverThenGo ((Clear ?d) (On ?y ?to)) (Move ?d ?to)
    (:prefer UncoverTarget) (:avoid))
  :max-uses 1)
(rule ((Clear ?d) (Clear ?to)) (Move ?d ?to)
  (pref GoStraight ((Clear ?d) (Clear ?to) (Smaller ?d ?to)) (Move ?d ?to)
    (:prefer DirectMove AlreadyThere) (:avoid))
  :max-uses 1)
"""

HANOI_PREFS = """\
; Upfront advice: the parking rule is pinned to towers on P1, which is
; where the expert imagined them.
(pref UpParkAsideP1 ((On ?x ?d) (On ?d P1)) (Move ?d ?to)
  (:prefer ParkAside) (:avoid ParkOnTarget))
(pref UpGoStraight ((Clear ?d) (Clear ?to) (Smaller ?d ?to)) (Move ?d ?to)
  (:prefer DirectMove) (:avoid))
(pref UpBigOnSmall ((On d3 d1)) (Move ?d ?to)
  (:prefer ParkAside) (:avoid ParkOnTarget))
"""

ROCKETS_DOM = """\
; One-way logistics: every flight burns one fuel token. Routing through
; a waypoint is legal but wastes fuel and steps.
(defdomain rockets (
  (:predicate At 2)
  (:predicate In 2)
  (:predicate Fuel 2)
  (:predicate Rocket 1)
  (:predicate Place 1)
  (:predicate Other 2)

  (:operator (load ?c ?r ?p)
    ((At ?c ?p) (At ?r ?p) (Rocket ?r) (Place ?p))
    ((At ?c ?p))
    ((In ?c ?r)))

  (:operator (unload ?c ?r ?p)
    ((In ?c ?r) (At ?r ?p) (Place ?p))
    ((In ?c ?r))
    ((At ?c ?p)))

  (:operator (fly ?r ?from ?to ?f)
    ((At ?r ?from) (Fuel ?r ?f) (Place ?to) (Other ?from ?to))
    ((At ?r ?from) (Fuel ?r ?f))
    ((At ?r ?to)))

  (:method DoneDelivery (Deliver ?c ?p)
    ((At ?c ?p))
    ())

  (:method UnloadHere (Deliver ?c ?p)
    ((In ?c ?r) (At ?r ?p))
    ((unload ?c ?r ?p)))

  (:method ShipFrom (Deliver ?c ?p)
    ((At ?c ?from) (At ?r ?from) (Rocket ?r) (Other ?from ?p))
    ((load ?c ?r ?from) (Fly ?r ?p) (unload ?c ?r ?p)))

  (:method FetchWith (Deliver ?c ?p)
    ((At ?c ?from) (Rocket ?r) (At ?r ?other) (Other ?other ?from)
     (Other ?from ?p))
    ((Fly ?r ?from) (Deliver ?c ?p)))

  (:method FlyDone (Fly ?r ?to)
    ((At ?r ?to))
    ())

  (:method FlyDirect (Fly ?r ?to)
    ((At ?r ?from) (Fuel ?r ?f) (Other ?from ?to))
    ((fly ?r ?from ?to ?f)))

  (:method FlyVia (Fly ?r ?to)
    ((At ?r ?from) (Fuel ?r ?f) (Place ?mid) (Other ?mid ?to)
     (Other ?mid ?from) (Other ?from ?to))
    ((fly ?r ?from ?mid ?f) (Fly ?r ?to)))
))
"""

# (name, places, rocket positions, fuel tokens, cargo positions, deliveries)
ROCKETS_PROBLEMS = [
    ("rockets-01", ["L1", "L2", "L3"], {"R1": "L1"}, 2,
     {"c1": "L1"}, [("c1", "L2")]),
    ("rockets-02", ["L1", "L2", "L3"], {"R1": "L1"}, 3,
     {"c1": "L1", "c2": "L1"}, [("c1", "L2"), ("c2", "L2")]),
    ("rockets-03", ["L1", "L2", "L3"], {"R1": "L2"}, 2,
     {"c1": "L1"}, [("c1", "L3")]),
    ("rockets-04", ["L1", "L2", "L3", "L4"], {"R1": "L1", "R2": "L3"}, 2,
     {"c1": "L3"}, [("c1", "L4")]),
    ("rockets-05", ["L1", "L2", "L3"], {"R1": "L1", "R2": "L2"}, 2,
     {"c1": "L2", "c2": "L1"}, [("c1", "L3"), ("c2", "L3")]),
    ("rockets-06", ["L1", "L2", "L3", "L4"], {"R1": "L1"}, 3,
     {"c1": "L2"}, [("c1", "L4")]),
    ("rockets-07", ["L1", "L2", "L3"], {"R1": "L3"}, 2,
     {"c1": "L1", "c2": "L2"}, [("c1", "L2")]),
    ("rockets-08", ["L1", "L2", "L3", "L4"], {"R1": "L2", "R2": "L2"}, 2,
     {"c1": "L2", "c2": "L2"}, [("c1", "L1"), ("c2", "L4")]),
    ("rockets-09", ["L1", "L2", "L3"], {"R1": "L1"}, 2,
     {"c1": "L2"}, [("c1", "L1")]),
    ("rockets-10", ["L1", "L2", "L3", "L4"], {"R1": "L4"}, 3,
     {"c1": "L4", "c2": "L1"}, [("c1", "L1")]),
    ("rockets-11", ["L1", "L2", "L3"], {"R1": "L1", "R2": "L3"}, 2,
     {"c1": "L1", "c2": "L3"}, [("c1", "L3"), ("c2", "L1")]),
    ("rockets-12", ["L1", "L2", "L3", "L4"], {"R1": "L1"}, 4,
     {"c1": "L1"}, [("c1", "L3")]),
]

ROCKETS_ORACLE = """\
; Scripted expert for deliveries.
(rule ((Fuel ?r ?f)) (Fly ?r ?to)
  (pref DirectFlights ((Fuel ?r ?f)) (Fly ?r ?to)
    (:prefer FlyDirect FlyDone) (:avoid FlyVia))
  :max-uses 1)
(rule ((At ?c ?from) (At ?r ?from) (Rocket ?r)) (Deliver ?c ?p)
  (pref UseLocalRocket ((At ?c ?from) (At ?r ?from) (Rocket ?r)) (Deliver ?c ?p)
    (:prefer ShipFrom) (:avoid FetchWith))
  :max-uses 1)
"""

ROCKETS_PREFS = """\
; Upfront advice pinned to rockets starting at L1.
(pref UpDirectFromL1 ((Fuel ?r ?f) (At ?r L1)) (Fly ?r ?to)
  (:prefer FlyDirect) (:avoid FlyVia))
(pref UpLocalRocket ((At ?c ?from) (At ?r ?from) (Rocket ?r)) (Deliver ?c ?p)
  (:prefer ShipFrom) (:avoid))
"""


def blocksworld_problem(name: str, stacks: list[list[str]], target: str) -> str:
    stacked = {b for stack in stacks for b in stack}
    atoms = ["(Space Table)", "(HandEmpty)"]
    for stack in stacks:
        atoms.append(f"(Clear {stack[0]})")
        for above, below in zip(stack, stack[1:]):
            atoms.append(f"(On {above} {below})")
        atoms.append(f"(OnTable {stack[-1]})")
    for block in BLOCKS:
        if block not in stacked:
            atoms.append(f"(OnTable {block})")
            atoms.append(f"(Clear {block})")
    return (
        f"(defproblem {name} blocksworld\n"
        f"  ({' '.join(atoms)})\n"
        f"  ((Clear {target}))\n"
        f"  ((Clear {target})))\n"
    )


def hanoi_problem(name, disks, stacks, tasks, goal) -> str:
    disk_names = [f"d{i}" for i in range(1, disks + 1)]
    pegs = ["P1", "P2", "P3"]
    atoms = []
    placed = set()
    for peg, stack in stacks.items():
        atoms.append(f"(Clear {stack[0]})")
        for above, below in zip(stack, stack[1:]):
            atoms.append(f"(On {above} {below})")
        atoms.append(f"(On {stack[-1]} {peg})")
        placed.update(stack)
    used_pegs = set(stacks)
    for peg in pegs:
        if peg not in used_pegs:
            atoms.append(f"(Clear {peg})")
    for i, small in enumerate(disk_names):
        for big in disk_names[i + 1:]:
            atoms.append(f"(Smaller {small} {big})")
        for peg in pegs:
            atoms.append(f"(Smaller {small} {peg})")
    spots = disk_names + pegs
    for a in spots:
        for b in spots:
            if a != b:
                atoms.append(f"(Other {a} {b})")
    task_text = " ".join(f"(Move {d} {to})" for d, to in tasks)
    goal_text = " ".join(f"(On {d} {to})" for d, to in goal)
    return (
        f"(defproblem {name} hanoi\n"
        f"  ({' '.join(atoms)})\n"
        f"  ({task_text})\n"
        f"  ({goal_text}))\n"
    )


def rockets_problem(name, places, rockets, fuel_per_rocket, cargo, deliveries) -> str:
    atoms = []
    for place in places:
        atoms.append(f"(Place {place})")
    for a in places:
        for b in places:
            if a != b:
                atoms.append(f"(Other {a} {b})")
    for rocket, place in rockets.items():
        atoms.append(f"(Rocket {rocket})")
        atoms.append(f"(At {rocket} {place})")
        for i in range(1, fuel_per_rocket + 1):
            atoms.append(f"(Fuel {rocket} f{rocket[1:]}-{i})")
    for box, place in cargo.items():
        atoms.append(f"(At {box} {place})")
    task_text = " ".join(f"(Deliver {c} {p})" for c, p in deliveries)
    goal_text = " ".join(f"(At {c} {p})" for c, p in deliveries)
    return (
        f"(defproblem {name} rockets\n"
        f"  ({' '.join(atoms)})\n"
        f"  ({task_text})\n"
        f"  ({goal_text}))\n"
    )


def write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
    print(f"wrote {os.path.relpath(path)}")


def suite_config(domain: str, problems: list[str]) -> str:
    config = {
        "domain": f"{domain}.dom",
        "problems": [f"{p}.prob" for p in problems],
        "oracle": f"{domain}.oracle",
        "prefs": f"{domain}.prefs",
        "strategies": ["none", "random", "upfront", "active"],
        "carry_prefs": True,
        "time_budget": 30.0,
        "seeds": [0],
    }
    return json.dumps(config, indent=2) + "\n"


def main() -> None:
    os.makedirs(OUT, exist_ok=True)
    write(os.path.join(OUT, "blocksworld.dom"), BLOCKSWORLD_DOM)
    write(os.path.join(OUT, "blocksworld.oracle"), BLOCKSWORLD_ORACLE)
    write(os.path.join(OUT, "blocksworld.prefs"), BLOCKSWORLD_PREFS)
    for name, stacks, target in BLOCKSWORLD_PROBLEMS:
        write(os.path.join(OUT, f"{name}.prob"), blocksworld_problem(name, stacks, target))
    write(
        os.path.join(OUT, "blocksworld.suite.json"),
        suite_config("blocksworld", [p[0] for p in BLOCKSWORLD_PROBLEMS]),
    )

    write(os.path.join(OUT, "hanoi.dom"), HANOI_DOM)
    write(os.path.join(OUT, "hanoi.oracle"), HANOI_ORACLE)
    write(os.path.join(OUT, "hanoi.prefs"), HANOI_PREFS)
    for name, disks, stacks, tasks, goal in HANOI_PROBLEMS:
        write(os.path.join(OUT, f"{name}.prob"), hanoi_problem(name, disks, stacks, tasks, goal))
    write(
        os.path.join(OUT, "hanoi.suite.json"),
        suite_config("hanoi", [p[0] for p in HANOI_PROBLEMS]),
    )

    write(os.path.join(OUT, "rockets.dom"), ROCKETS_DOM)
    write(os.path.join(OUT, "rockets.oracle"), ROCKETS_ORACLE)
    write(os.path.join(OUT, "rockets.prefs"), ROCKETS_PREFS)
    for name, places, rockets, fuel, cargo, deliveries in ROCKETS_PROBLEMS:
        write(
            os.path.join(OUT, f"{name}.prob"),
            rockets_problem(name, places, rockets, fuel, cargo, deliveries),
        )
    write(
        os.path.join(OUT, "rockets.suite.json"),
        suite_config("rockets", [p[0] for p in ROCKETS_PROBLEMS]),
    )


if __name__ == "__main__":
    main()
