"""Regenerate published_outcomes.jsonl.

The fixture transcribes published per-approach results for a 102-instance
Blocksworld suite. Only aggregates and a few named instances were published,
so most per-instance cells are reconstructed to be consistent with those
aggregates. Every record lists the fields that are reconstructed in its
`inferred` array. The file exists to exercise the metric pipeline; it is not
output of this software.

Run: python3 generate_published_outcomes.py > published_outcomes.jsonl
"""

import json
import random

N = 102
BLOCK = 10
FD = ["FD lama-first", "FD seq-sat-lama-2011"]
DIRECT, AGENTIC = "Direct LLM", "Agentic LLM"
APPROACHES = FD + [DIRECT, AGENTIC]

fd_timeouts = {72, 76, 78, 84, 86, 87, 93, 94, 95, 96, 97, 98, 99, 100, 101}
fd_solved = set(range(N)) - fd_timeouts

direct_solved = (
    set(range(0, 20)) | (set(range(20, 60)) - {20, 30, 31, 40, 41, 50, 51, 52, 53})
    | {60, 61, 62, 70, 71, 73, 74, 80, 81, 86, 88, 89, 90, 100}
)
agentic_early = {32, 88, 89, 96, 98, 100}
agentic_solved = (
    set(range(0, 60)) - {32, 33, 42, 54, 55}
) | {63, 64, 65, 66, 70, 71, 73, 75, 76, 78, 82, 86, 101}

# Cells stated outright in the published text.
exact_status = {a: set() for a in APPROACHES}
for a in FD:
    exact_status[a] |= set(range(0, 70)) | {76, 78, 86, 100, 101}
exact_status[AGENTIC] |= agentic_early | {76, 78, 86, 100, 101}
exact_status[DIRECT] |= {32, 88, 89, 100, 96, 98, 76, 78, 86, 101}

solved = {FD[0]: fd_solved, FD[1]: fd_solved, DIRECT: direct_solved, AGENTIC: agentic_solved}
co_solved = fd_solved & direct_solved & agentic_solved

# Block sums chosen so the one-decimal means match the published tables.
# (block start) -> sum over FD-solved instances
fd_block_sum = {
    FD[0]: [140, 398, 616, 1464, 1992, 2224, 2538, 1970, 2660, 1452],
    FD[1]: [140, 376, 364, 648, 1068, 1354, 2072, 1598, 2296, 1124],
}
# (block start) -> sum over co-solved instances, for blocks that have any
co_block_sum = {
    FD[0]: {0: 140, 10: 398, 20: 540, 30: 986, 40: 1380, 50: 862, 70: 426},
    FD[1]: {0: 140, 10: 376, 20: 326, 30: 380, 40: 648, 50: 578, 70: 410},
    DIRECT: {0: 140, 10: 274, 20: 364, 30: 358, 40: 546, 50: 398, 70: 418},
    AGENTIC: {0: 158, 10: 306, 20: 402, 30: 362, 40: 550, 50: 498, 70: 418},
}

rng = random.Random(20251019)


def spread(total, k, jitter):
    """k positive integers summing to total, gently increasing."""
    if k == 0:
        assert total == 0
        return []
    base = total / k
    raw = [base * (0.85 + 0.3 * i / max(k - 1, 1)) + rng.uniform(-jitter, jitter) for i in range(k)]
    scale = total / sum(raw)
    vals = [max(1, round(v * scale)) for v in raw]
    vals[-1] += total - sum(vals)
    assert vals[-1] > 0 and sum(vals) == total
    return vals


def block_of(i):
    return i - i % BLOCK


length = {a: {} for a in APPROACHES}
for b in range(0, 100, BLOCK):
    members = [i for i in range(b, min(b + BLOCK, N))]
    fd_in = [i for i in members if i in fd_solved]
    co_in = [i for i in members if i in co_solved]
    rest = [i for i in fd_in if i not in co_solved]
    seq_co = spread(co_block_sum[FD[1]].get(b, 0), len(co_in), 0.5)
    seq_rest = spread(fd_block_sum[FD[1]][b // BLOCK] - sum(seq_co), len(rest), 1.5)
    seq = dict(zip(co_in + rest, seq_co + seq_rest))
    # lama never beats seq on the same instance
    lama_gap_co = co_block_sum[FD[0]].get(b, 0) - sum(seq_co)
    lama_gap_rest = fd_block_sum[FD[0]][b // BLOCK] - sum(seq_co) - sum(seq_rest) - lama_gap_co
    gaps = (spread(lama_gap_co, len(co_in), 0.5) if lama_gap_co else [0] * len(co_in)) + (
        spread(lama_gap_rest, len(rest), 1.0) if lama_gap_rest else [0] * len(rest)
    )
    for i, g in zip(co_in + rest, gaps):
        length[FD[1]][i] = seq[i]
        length[FD[0]][i] = seq[i] + g
    for a in (DIRECT, AGENTIC):
        target = co_block_sum[a].get(b, 0)
        if b == 0 and a == DIRECT:
            vals = [seq[i] for i in co_in]
        else:
            vals = spread(target, len(co_in), 0.5)
        length[a].update(zip(co_in, vals))

# LLM plans outside the co-solved set: near the anytime planner's length when
# it exists, otherwise a size-based guess.
guess = {76: 172, 78: 168, 86: 206, 100: 228, 101: 186}
for a in (DIRECT, AGENTIC):
    for i in sorted(solved[a] - co_solved):
        if i in length[FD[1]]:
            length[a][i] = max(2, round(length[FD[1]][i] * rng.uniform(0.78, 0.95)))
        else:
            length[a][i] = guess[i] + (6 if a == DIRECT and i == 86 else 0)
length[AGENTIC][101] = 186

# Direct attempts: solved runs centre on 2, budget-exhausted runs on 15.
direct_attempts = {}
solved_pattern = [1, 2, 2, 3, 1, 2, 4, 2, 1, 3, 2, 2, 5, 1, 2]
failed_pattern = [15, 13, 17, 15, 12, 16, 15, 18, 14, 15, 11, 19]
for n, i in enumerate(sorted(direct_solved)):
    direct_attempts[i] = solved_pattern[n % len(solved_pattern)]
for n, i in enumerate(sorted(set(range(N)) - direct_solved)):
    direct_attempts[i] = failed_pattern[n % len(failed_pattern)]


def tokens(total, weights):
    """Integer split of total proportional to weights."""
    s = sum(weights.values())
    out = {i: int(total * w / s) for i, w in weights.items()}
    short = total - sum(out.values())
    for i in sorted(weights, key=lambda i: -weights[i])[:short]:
        out[i] += 1
    assert sum(out.values()) == total
    return out


direct_tokens = tokens(2_905_825, {i: direct_attempts[i] * (1 + i / 40) for i in range(N)})
agentic_tokens = tokens(
    17_326_128,
    {i: (1 + i / 25) * (0.5 if i in agentic_early else 1.0) for i in range(N)},
)

BUDGET = 180.0
records = []
for i in range(N):
    for a in APPROACHES:
        if i in solved[a]:
            status = "solved"
        elif a == AGENTIC and i in agentic_early:
            status = "early_exit"
        else:
            status = "timeout"
        inferred = []
        if i not in exact_status[a]:
            inferred.append("status")
        pl = length[a].get(i) if status == "solved" else None
        if pl is not None and not (a == AGENTIC and i == 101):
            inferred.append("plan_length")
        if status == "timeout":
            wall = BUDGET
        elif a in FD:
            wall = round(0.05 + (i / 100) ** 3 * 150 + rng.uniform(0, 0.2), 2)
        elif a == AGENTIC and i == 101:
            wall = 122.0
        else:
            wall = round(rng.uniform(8, 40) + i * 1.1, 2)
        inferred.append("wall_time_s")
        if a == DIRECT:
            t = direct_tokens[i]
            attempts = direct_attempts[i]
            inferred += ["tokens_in", "tokens_out", "attempts"]
        elif a == AGENTIC:
            t = agentic_tokens[i]
            attempts = 1
            inferred += ["tokens_in", "tokens_out"]
        else:
            t = 0
            attempts = 1
        tin = round(t * 0.88)
        records.append(
            {
                "instance": i,
                "name": f"blocks-{i:03d}",
                "approach": a,
                "status": status,
                "plan_length": pl,
                "wall_time_s": wall,
                "tokens_in": tin,
                "tokens_out": t - tin,
                "attempts": attempts,
                "source": "published",
                "inferred": inferred,
            }
        )

for r in records:
    print(json.dumps(r))
