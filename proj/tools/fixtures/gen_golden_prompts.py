#!/usr/bin/env python3
"""Renders the generation and retrieval templates with fixed inputs into golden files.

Substitution here is plain str.replace, independent of the C++ renderer.
"""
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parents[2]
GOLDEN = ROOT / "tests" / "golden"

INPUTS = {
    "generation": {
        "task": "Reschedule the team sync from Monday 10:00 to Friday 10:00.",
        "validation": "failure",
        "trajectory": ("Step 1\nThought: Find the sync.\nAction: Calendar__search_events({\"query\":\"team sync\"})\n"
                       "Observation: [{\"event_id\":\"ev-1\",\"title\":\"Team sync\"}]\n\n"
                       "Final answer: Moved the sync to Friday.\n"),
    },
    "retrieval": {
        "task": "Email the attendees of tomorrow's design review.",
        "k": 20,
        "heuristics": [
            {"scenario_id": "scenario_universe_27_9aqrhh", "task": "Reschedule dinner and email attendees.",
             "outcome": "failure",
             "raw_text": "Analysis: Used names instead of addresses.\nLearned Guideline:\n"
                         "Trigger: When I need to send an email and my input is attendee names.\n"
                         "Action: Resolve and validate recipient addresses before calling the email tool."},
            {"scenario_id": "S2", "task": "Count contacts in Lyon.", "outcome": "success",
             "raw_text": "Analysis: Search by city worked.\nTrigger: Counting by city.\nAction: Use search."},
            {"scenario_id": "S3", "task": "Move the dentist appointment.", "outcome": "failure",
             "raw_text": "Analysis: Left the original event.\nTrigger: Rescheduling.\nAction: Delete the original."},
        ],
    },
}


def listing(heuristics):
    blocks = []
    for h in heuristics:
        blocks.append(f"Scenario ID: {h['scenario_id']}\nTask description: {h['task']}\n"
                      f"Reward: {h['outcome']}\nHeuristic text:\n{h['raw_text']}\n")
    return "\n---\n".join(blocks)


def main():
    gen = (ROOT / "templates" / "heuristic_generation.txt").read_text()
    g = INPUTS["generation"]
    # Single pass: substituted values never contain other placeholders here.
    gen = gen.replace("{task_info}", g["task"]).replace("{validation_info}", g["validation"])
    gen = gen.replace("{trajectory_text}", g["trajectory"])
    (GOLDEN / "heuristic_generation.rendered.txt").write_text(gen)

    ret = (ROOT / "templates" / "heuristic_retrieval.txt").read_text()
    r = INPUTS["retrieval"]
    ret = ret.replace("{k}", str(r["k"])).replace("{task}", r["task"])
    ret = ret.replace("{heuristics_list}", listing(r["heuristics"]))
    (GOLDEN / "heuristic_retrieval.rendered.txt").write_text(ret)

    (GOLDEN / "prompt_inputs.json").write_text(json.dumps(INPUTS, indent=2) + "\n")


if __name__ == "__main__":
    main()
