"""Collects one status line per acceptance criterion for the terminal summary."""

TITLES = {
    1: "six-zero nonce reproduction",
    2: "seven-zero nonce reproduction",
    3: "eight-zero nonce verification",
    4: "difficulty scaling",
    5: "avalanche",
    6: "immutability under single-bit mutation",
    7: "mint double-spend prevention",
    8: "PoS proportionality and golden count",
    9: "BGP scenarios A and B",
    10: "BGP agreement/validity sweep",
    11: "simulator determinism and convergence",
    12: "Merkle proofs and sentinels",
}

RESULTS: dict = {}


def record(num: int, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {TITLES[num]}"
    if detail:
        line += f" ({detail})"
    RESULTS[num] = line
    print(line)


def summary_lines() -> list:
    return [RESULTS.get(n, f"[SKIP] {n:>2}. {TITLES[n]} (not run)") for n in sorted(TITLES)]
