#!/usr/bin/env python3
"""Writes a 244-record pool file (112 execution-style + 132 search-style tasks)."""
import json
import pathlib
import random

OUT = pathlib.Path(__file__).resolve().parents[2] / "tests" / "golden" / "pool_244.jsonl"


def record(i, kind, rng):
    outcome = rng.choice(["success", "failure"])
    sid = f"scenario_{kind}_{i:03d}"
    task = f"{kind} task number {i}: " + rng.choice(
        ["reschedule a meeting", "email the attendees", "count contacts in a city", "find the next event",
         "cancel duplicate events", "reply to the latest email"])
    analysis = f"The episode ended in {outcome} because step {rng.randint(1, 9)} " + rng.choice(
        ["used names instead of addresses.", "skipped verification.", "queried the right window.",
         "deleted the original event."])
    trigger = "When " + rng.choice(["a task mentions next week", "recipients are names", "events are moved"]) + "."
    action = "I must " + rng.choice(["look up contacts first", "verify the calendar", "compute the date range"]) + "."
    raw = f"Analysis: {analysis}\nLearned Guideline:\nTrigger: {trigger}\nAction: {action}"
    day = 1 + i % 28
    return {"scenario_id": sid, "task": task, "outcome": outcome, "outcome_source": "env_reward",
            "analysis": analysis, "guideline_trigger": trigger, "guideline_action": action, "raw_text": raw,
            "created_at": f"2024-10-{day:02d}T12:00:00Z"}


def main():
    rng = random.Random(244)
    rows = [record(i, "execution", rng) for i in range(112)] + [record(i, "search", rng) for i in range(132)]
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w") as f:
        for r in rows:
            f.write(json.dumps(r, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
