#!/usr/bin/env python3
"""Writes the demo universes, scenarios and scripted-backend files under data/.

Run from the repository root:  python3 tools/fixtures/gen_demo.py
"""
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parents[2]
NOW = "2024-10-15 09:00:00"

LESSONS_BEGIN = "=== BEGIN Lessons from past experience ==="


def dump(path, obj):
    path = ROOT / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def contact(uid, name, age, city):
    local = name.lower().replace(" ", ".")
    return {"name": name, "email": f"{local}@{uid}.example.com", "age": age, "city": city}


def event(uid, n, title, start, end, attendees=()):
    return {"event_id": f"{uid}-ev-{n:03d}", "title": title, "start": start, "end": end,
            "attendees": list(attendees)}


def email(uid, n, to, subject, body, sent_at):
    return {"message_id": f"{uid}-msg-{n:03d}", "to": to, "subject": subject, "body": body,
            "sent_at": sent_at}


def universe(uid, contacts, events, emails=()):
    return {"universe_id": uid, "now": NOW, "contacts": contacts, "calendar_events": events,
            "emails": list(emails)}


def filler_universe(uid, names, cities):
    contacts = [contact(uid, n, 30 + 7 * i, cities[i % len(cities)]) for i, n in enumerate(names)]
    events = [event(uid, 1, "Weekly planning", "2024-10-16 10:00:00", "2024-10-16 11:00:00", [names[0]]),
              event(uid, 2, "Coffee chat", "2024-10-18 15:00:00", "2024-10-18 15:30:00", [names[1]])]
    emails = [email(uid, 1, [contacts[0]["email"]], "Notes", "Notes from the last meeting.", "2024-10-14 17:00:00")]
    return universe(uid, contacts, events, emails)


# --- universes -------------------------------------------------------------------

def universes():
    u = {}
    u["u01"] = universe("u01", [
        contact("u01", "Elena Petrova", 44, "Sofia"),
        contact("u01", "Tom Becker", 36, "Berlin"),
        contact("u01", "Sara Lindqvist", 29, "Malmo"),
        contact("u01", "Karim Benali", 51, "Tunis"),
        contact("u01", "Julia Novak", 33, "Prague"),
    ], [
        event("u01", 1, "Dentist appointment", "2024-10-17 10:00:00", "2024-10-17 11:00:00"),
        event("u01", 2, "Team lunch", "2024-10-16 12:00:00", "2024-10-16 13:00:00", ["Tom Becker", "Julia Novak"]),
        event("u01", 3, "Yoga class", "2024-10-18 18:00:00", "2024-10-18 19:00:00"),
    ], [email("u01", 1, ["tom.becker@u01.example.com"], "Lunch", "See you Wednesday.", "2024-10-14 08:30:00")])
    u["u02"] = universe("u02", [
        contact("u02", "Marco Rossi", 39, "Milan"),
        contact("u02", "Lena Fischer", 31, "Vienna"),
        contact("u02", "David Cohen", 47, "Haifa"),
        contact("u02", "Aiko Tanaka", 26, "Kyoto"),
        contact("u02", "Pablo Ortega", 58, "Seville"),
    ], [
        event("u02", 1, "Project kickoff", "2024-10-21 10:00:00", "2024-10-21 11:00:00", ["Marco Rossi", "Lena Fischer"]),
        event("u02", 2, "Dinner with David", "2024-10-19 19:00:00", "2024-10-19 21:00:00", ["David Cohen"]),
    ])
    u["u03"] = universe("u03", [
        contact("u03", "Camille Laurent", 42, "Lyon"),
        contact("u03", "Hugo Bernard", 35, "Lyon"),
        contact("u03", "Nadia Haddou", 28, "Marseille"),
        contact("u03", "Louis Girard", 63, "Lyon"),
        contact("u03", "Emma Roux", 30, "Nantes"),
        contact("u03", "Yann Le Goff", 49, "Brest"),
    ], [event("u03", 1, "Book club", "2024-10-17 19:00:00", "2024-10-17 21:00:00", ["Emma Roux"])])
    u["u04"] = universe("u04", [
        contact("u04", "Priya Nair", 37, "Bangalore"),
        contact("u04", "Arjun Mehta", 45, "Mumbai"),
        contact("u04", "Grace Okafor", 32, "Lagos"),
        contact("u04", "Liam Walsh", 40, "Dublin"),
        contact("u04", "Sofia Reyes", 27, "Lima"),
    ], [event("u04", 1, "Quarterly planning", "2024-10-22 14:00:00", "2024-10-22 16:00:00", ["Arjun Mehta"])])
    u["u05"] = universe("u05", [
        contact("u05", "Noah Schmidt", 38, "Hamburg"),
        contact("u05", "Olivia Brown", 43, "Leeds"),
        contact("u05", "Mateo Silva", 29, "Porto Alegre"),
        contact("u05", "Chloe Martin", 55, "Quebec"),
        contact("u05", "Ethan Clark", 34, "Denver"),
    ], [
        event("u05", 1, "Gym session", "2024-10-16 07:00:00", "2024-10-16 08:00:00"),
        event("u05", 2, "Budget review", "2024-10-22 10:00:00", "2024-10-22 11:00:00", ["Olivia Brown"]),
        event("u05", 3, "Board meeting", "2024-10-21 09:30:00", "2024-10-21 11:30:00", ["Noah Schmidt", "Chloe Martin"]),
        event("u05", 4, "Client call", "2024-10-23 16:00:00", "2024-10-23 16:30:00", ["Ethan Clark"]),
    ])
    u["u06"] = universe("u06", [
        contact("u06", "Ravi Kapoor", 41, "Delhi"),
        contact("u06", "Anna Kowalska", 36, "Krakow"),
        contact("u06", "Felix Wagner", 30, "Munich"),
        contact("u06", "Isabel Torres", 48, "Madrid"),
        contact("u06", "Kenji Mori", 52, "Osaka"),
    ], [
        event("u06", 1, "Standup", "2024-10-16 09:00:00", "2024-10-16 09:15:00", ["Felix Wagner"]),
        event("u06", 2, "Standup", "2024-10-17 09:00:00", "2024-10-17 09:15:00", ["Felix Wagner"]),
        event("u06", 3, "Design review", "2024-10-17 14:00:00", "2024-10-17 15:00:00", ["Anna Kowalska"]),
    ])
    u["u07"] = filler_universe("u07", ["Greta Holm", "Bruno Alves", "Maya Cohen", "Ivan Petrov", "Lucia Ferri"],
                               ["Oslo", "Porto", "Tel Aviv"])
    u["u08"] = filler_universe("u08", ["Oscar Nilsson", "Zoe Adams", "Samir Aziz", "Hannah Weber", "Leo Rossi"],
                               ["Stockholm", "Boston", "Cairo"])
    u["t01"] = universe("t01", [
        contact("t01", "Hana Sato", 34, "Osaka"),
        contact("t01", "Omar Haddad", 41, "Porto"),
        contact("t01", "Rui Costa", 52, "Porto"),
        contact("t01", "Ana Silva", 27, "Lisbon"),
        contact("t01", "Peter Hall", 60, "Bristol"),
    ], [
        event("t01", 1, "Quarterly review", "2024-10-16 15:00:00", "2024-10-16 16:00:00", ["Hana Sato"]),
        event("t01", 2, "Offsite planning", "2024-10-18 10:00:00", "2024-10-18 12:00:00", ["Hana Sato", "Omar Haddad"]),
    ], [email("t01", 1, ["ana.silva@t01.example.com"], "Slides", "Slides attached.", "2024-10-14 11:00:00")])
    u["t02"] = universe("t02", [
        contact("t02", "Vasile Munteanu", 70, "Chisinau"),
        contact("t02", "August Blackwood", 79, "York"),
        contact("t02", "Mia Keller", 29, "Zurich"),
        contact("t02", "Ines Moreau", 38, "Paris"),
        contact("t02", "Claire Dubois", 61, "Paris"),
        contact("t02", "Jules Martin", 45, "Paris"),
    ], [
        event("t02", 1, "Wine Tasting Event", "2024-11-05 18:00:00", "2024-11-05 20:00:00", ["Vasile Munteanu", "Mia Keller"]),
        event("t02", 2, "Wine tasting evening", "2024-11-08 18:00:00", "2024-11-08 20:00:00", ["August Blackwood"]),
        event("t02", 3, "Wine tasting for beginners", "2024-11-12 18:00:00", "2024-11-12 20:00:00", ["Mia Keller"]),
        event("t02", 4, "Wine tasting", "2024-10-25 18:00:00", "2024-10-25 20:00:00", ["Vasile Munteanu"]),
    ])
    return u


# --- scenarios -------------------------------------------------------------------

def scenario(sid, uid, split, task, checks):
    return {"scenario_id": sid, "universe_id": uid, "split": split, "task": task, "checks": checks}


SOURCE = [
    scenario("S1", "u01", "execution",
             "Move my 'Dentist appointment' on 2024-10-17 at 10:00 to 2024-10-18 at 14:00, keeping the same one-hour duration.",
             [{"kind": "event_exists", "parameters": {"title": "Dentist appointment", "start": "2024-10-18 14:00:00",
                                                       "end": "2024-10-18 15:00:00"}},
              {"kind": "event_absent", "parameters": {"event_id": "u01-ev-001"}}]),
    scenario("S2", "u02", "execution",
             "Email Marco Rossi and Lena Fischer with the subject 'Project sync' and ask whether they can meet on Thursday.",
             [{"kind": "email_sent", "parameters": {"recipient": "marco.rossi@u02.example.com", "subject_contains": "Project sync"}},
              {"kind": "email_sent", "parameters": {"recipient": "lena.fischer@u02.example.com", "subject_contains": "Project sync"}}]),
    scenario("S3", "u03", "search", "How many of my contacts live in Lyon? Answer with the number only.",
             [{"kind": "answer_contains", "parameters": {"substring": "3"}}]),
    scenario("S4", "u04", "execution",
             "Send an email to Priya Nair with the subject 'Lunch' and an invitation to lunch on Friday.",
             [{"kind": "email_sent", "parameters": {"recipient": "priya.nair@u04.example.com", "subject_contains": "Lunch"}}]),
    scenario("S5", "u05", "search", "What is the title of my first event next week? Answer with the title.",
             [{"kind": "answer_contains", "parameters": {"substring": "Board meeting"}}]),
    scenario("S6", "u06", "execution", "Cancel both 'Standup' meetings scheduled this week.",
             [{"kind": "event_absent", "parameters": {"title": "Standup"}}]),
]

WINE_TASK = ("I want to dedicate next month to young wine enthusiasts, so delete all events scheduled for next month "
             "that contain 'Wine tasting' in the title and have one or more attendee over 45 years old. Schedule new "
             "events titled 'Wine Awakening' to replace them with no attendees and the same timings.")

TEST = [
    scenario("T1", "t01", "execution",
             "Move my 'Quarterly review' from 2024-10-16 15:00 to 2024-10-17 at 11:00, keeping the same one-hour duration and attendees.",
             [{"kind": "event_exists", "parameters": {"title": "Quarterly review", "start": "2024-10-17 11:00:00",
                                                       "end": "2024-10-17 12:00:00", "attendees": ["Hana Sato"]}},
              {"kind": "event_absent", "parameters": {"event_id": "t01-ev-001"}}]),
    scenario("T2", "t01", "execution",
             "Send an email to Hana Sato and Omar Haddad with the subject 'Offsite agenda' asking them to review the agenda before Friday.",
             [{"kind": "email_sent", "parameters": {"recipient": "hana.sato@t01.example.com", "subject_contains": "Offsite agenda"}},
              {"kind": "email_sent", "parameters": {"recipient": "omar.haddad@t01.example.com", "subject_contains": "Offsite agenda"}}]),
    scenario("T3", "t02", "execution", WINE_TASK,
             [{"kind": "event_absent", "parameters": {"event_id": "t02-ev-001"}},
              {"kind": "event_absent", "parameters": {"event_id": "t02-ev-002"}},
              {"kind": "event_exists", "parameters": {"title": "Wine Awakening", "start": "2024-11-05 18:00:00",
                                                       "end": "2024-11-05 20:00:00", "attendees": []}},
              {"kind": "event_exists", "parameters": {"title": "Wine Awakening", "start": "2024-11-08 18:00:00",
                                                       "end": "2024-11-08 20:00:00", "attendees": []}},
              {"kind": "event_exists", "parameters": {"title": "Wine tasting for beginners"}},
              {"kind": "event_exists", "parameters": {"title": "Wine tasting"}}]),
    scenario("T4", "t01", "search", "How many of my contacts live in Porto? Answer with the number only.",
             [{"kind": "answer_contains", "parameters": {"substring": "2"}}]),
    scenario("T5", "t02", "execution",
             "Send Ines Moreau an email with the subject 'Invoice' letting them know the invoice is attached.",
             [{"kind": "email_sent", "parameters": {"recipient": "ines.moreau@t02.example.com", "subject_contains": "Invoice"}}]),
    scenario("T6", "t02", "search", "Who is my oldest contact living in Paris? Answer with the full name.",
             [{"kind": "answer_contains", "parameters": {"substring": "Claire Dubois"}}]),
]


# --- scripted turns --------------------------------------------------------------

def call(thought, tool, **arguments):
    return {"content": thought, "tool_call": {"name": tool, "arguments": arguments}}


def final(thought, answer):
    return f"{thought}\nFINAL ANSWER: {answer}"


def guarded(entry, *guards):
    entry = dict(entry) if isinstance(entry, dict) else {"content": entry}
    entry["guard"] = list(guards)
    return entry


ROLLOUT_SOURCE = {
    "S1": [
        call("I need to find the dentist appointment first.", "Calendar__search_events", query="Dentist"),
        call("Found it. I will create the appointment at the new time.", "Calendar__add_calendar_event",
             title="Dentist appointment", start_datetime="2024-10-18 14:00:00", end_datetime="2024-10-18 15:00:00",
             attendees=[]),
        final("The appointment is now on Friday.", "Your dentist appointment is moved to 2024-10-18 14:00."),
    ],
    "S2": [
        call("I will email both people directly.", "Emails__send_email", recipients=["Marco Rossi", "Lena Fischer"],
             subject="Project sync", content="Hi both, can we meet on Thursday?"),
        final("The email tool rejected the recipients.", "I could not send the email because the addresses were rejected."),
    ],
    "S3": [
        call("Search contacts by city.", "Contacts__search_contacts", query="Lyon"),
        final("Three contacts are in Lyon.", "3"),
    ],
    "S4": [
        call("I need Priya's address.", "Contacts__get_contact", name="Priya Nair"),
        call("Now send the invitation.", "Emails__send_email", recipients=["priya.nair@u04.example.com"],
             subject="Lunch", content="Would you like to have lunch on Friday?"),
        final("Sent.", "I emailed Priya Nair an invitation to lunch on Friday."),
    ],
    "S5": [
        call("Next week depends on today's date.", "System__get_current_time"),
        call("Today is 2024-10-15, so next week runs from 2024-10-21.", "Calendar__get_calendar_events_from_to",
             start_datetime="2024-10-21 00:00:00", end_datetime="2024-10-28 00:00:00"),
        final("The earliest event is the board meeting.", "Board meeting"),
    ],
    "S6": [
        call("Find the standups.", "Calendar__search_events", query="Standup"),
        call("Delete the standup.", "Calendar__delete_calendar_event", event_id="u06-ev-001"),
        final("Done.", "The standup meeting is cancelled."),
    ],
}

REFLECTIONS = {
    "S1": ("Analysis: I created the new 'Dentist appointment' at the requested time but never deleted the original "
           "event, so the old slot stayed on the calendar and the task failed.\n"
           "Learned Guideline: Rescheduling is create plus delete, followed by verification.\n"
           "Trigger: When instructed to reschedule, move, or change the date/time of an existing calendar event.\n"
           "Action: Locate the original event_id, create the new event and delete the original event, then query "
           "the calendar to confirm the original is removed and the new event exists."),
    "S2": ("Analysis: I called Emails__send_email with attendee names instead of email addresses and the tool "
           "returned an Invalid email address error. I gave up instead of resolving the addresses.\n"
           "Learned Guideline: Resolve recipients before sending.\n"
           "Trigger: When I need to send an email and only have the recipients' names.\n"
           "Action: Look up each recipient with Contacts__get_contact or Contacts__search_contacts and pass their "
           "email addresses to Emails__send_email. If an Invalid email address error comes back, fix that "
           "recipient and retry."),
    "S3": ("Analysis: Searching contacts by the city name returned exactly the matching people, so counting them "
           "was direct.\n"
           "Learned Guideline: Use the search tool as a filter.\n"
           "Trigger: When asked to count or filter contacts by city.\n"
           "Action: Call Contacts__search_contacts with the city name and count the returned entries before answering."),
    "S4": ("Analysis: Fetching the contact first gave me a valid address, so the email went through on the first try.\n"
           "Learned Guideline: Resolve, then send.\n"
           "Trigger: When sending an email to a named contact.\n"
           "Action: Resolve the address with Contacts__get_contact first, then call Emails__send_email with it."),
    "S5": ("Analysis: Reading the current time before computing 'next week' gave the right date window.\n"
           "Learned Guideline: Anchor relative dates.\n"
           "Trigger: When a task uses relative dates such as next week or next month.\n"
           "Action: Call System__get_current_time, compute the explicit date range, then query "
           "Calendar__get_calendar_events_from_to."),
    "S6": ("Analysis: The search returned two Standup events but I deleted only the first one.\n"
           "Learned Guideline: Delete every match and verify.\n"
           "Trigger: When asked to cancel or delete several events matching a description.\n"
           "Action: Search for every match, delete each matching event_id, then search again to verify none remain."),
}

ASSESSMENTS = {
    "S1": "The new appointment exists, but the original one was not removed.\nVERDICT: FAILURE",
    "S2": "The email was never sent.\nVERDICT: FAILURE",
    "S3": "The count came from the search results.\nVERDICT: SUCCESS",
    "S4": "The email was sent to the resolved address.\nVERDICT: SUCCESS",
    "S5": "The answer matches the earliest event of next week.\nVERDICT: SUCCESS",
    "S6": "A standup was cancelled.\nVERDICT: SUCCESS",
}

# Guard strings proving the retrieved lessons reached the system prompt.
RESCHEDULE_GUARD = [LESSONS_BEGIN, "delete the original event"]
RECIPIENT_GUARD = [LESSONS_BEGIN, "Look up each recipient"]


def t1_baseline():
    return [
        call("Find the review.", "Calendar__search_events", query="Quarterly review"),
        call("Create it at the new time.", "Calendar__add_calendar_event", title="Quarterly review",
             start_datetime="2024-10-17 11:00:00", end_datetime="2024-10-17 12:00:00", attendees=["Hana Sato"]),
        final("Moved.", "The quarterly review is now on 2024-10-17 at 11:00."),
    ]


def t1_erl():
    return [
        guarded(call("Per the reschedule lesson, I first locate the original event_id.", "Calendar__search_events",
                     query="Quarterly review"), *RESCHEDULE_GUARD),
        call("The original is t01-ev-001. Create the replacement first.", "Calendar__add_calendar_event",
             title="Quarterly review", start_datetime="2024-10-17 11:00:00", end_datetime="2024-10-17 12:00:00",
             attendees=["Hana Sato"]),
        call("Now delete the original event.", "Calendar__delete_calendar_event", event_id="t01-ev-001"),
        call("Verify only the new event remains.", "Calendar__search_events", query="Quarterly review"),
        final("Verified.", "The quarterly review moved to 2024-10-17 11:00 and the old slot is removed."),
    ]


def t2_baseline():
    return [
        call("Send to both.", "Emails__send_email", recipients=["Hana Sato", "Omar Haddad"], subject="Offsite agenda",
             content="Please review the agenda before Friday."),
        final("The addresses were rejected.", "I was unable to send the email."),
    ]


def t2_erl():
    return [
        guarded(call("The lesson says to resolve recipients first.", "Contacts__get_contact", name="Hana Sato"),
                *RECIPIENT_GUARD),
        call("Next recipient.", "Contacts__get_contact", name="Omar Haddad"),
        call("Send with resolved addresses.", "Emails__send_email",
             recipients=["hana.sato@t01.example.com", "omar.haddad@t01.example.com"], subject="Offsite agenda",
             content="Please review the agenda before Friday."),
        final("Sent.", "I emailed Hana Sato and Omar Haddad about the offsite agenda."),
    ]


def t3(erl):
    first = call("Next month is November. List its events.", "Calendar__get_calendar_events_from_to",
                 start_datetime="2024-11-01 00:00:00", end_datetime="2024-12-01 00:00:00")
    turns = [guarded(first, *RESCHEDULE_GUARD) if erl else first,
             call("Check attendee ages.", "Contacts__get_contact", name="Vasile Munteanu"),
             call("And the next one.", "Contacts__get_contact", name="August Blackwood"),
             call("And Mia.", "Contacts__get_contact", name="Mia Keller")]
    add1 = call("The Nov 5 event includes Vasile Munteanu (70). Create the replacement.",
                "Calendar__add_calendar_event", title="Wine Awakening", start_datetime="2024-11-05 18:00:00",
                end_datetime="2024-11-05 20:00:00", attendees=[])
    add2 = call("The Nov 8 event includes August Blackwood (79). Create the replacement.",
                "Calendar__add_calendar_event", title="Wine Awakening", start_datetime="2024-11-08 18:00:00",
                end_datetime="2024-11-08 20:00:00", attendees=[])
    if erl:
        turns += [add1,
                  call("Per the safe reschedule procedure, delete the original event.",
                       "Calendar__delete_calendar_event", event_id="t02-ev-001"),
                  add2,
                  call("To complete the safe reschedule, delete the original.", "Calendar__delete_calendar_event",
                       event_id="t02-ev-002"),
                  call("Verify the calendar.", "Calendar__get_calendar_events_from_to",
                       start_datetime="2024-11-01 00:00:00", end_datetime="2024-12-01 00:00:00"),
                  final("Both replaced.", "Replaced the Nov 5 and Nov 8 wine tastings with Wine Awakening events.")]
    else:
        turns += [add1, add2,
                  final("Both created.", "Created Wine Awakening events on Nov 5 and Nov 8.")]
    return turns


def t4():
    return [call("Search by city.", "Contacts__search_contacts", query="Porto"), final("Two results.", "2")]


def t5_good(erl):
    first = call("Get the address.", "Contacts__get_contact", name="Ines Moreau")
    return [guarded(first, *RECIPIENT_GUARD) if erl else first,
            call("Send it.", "Emails__send_email", recipients=["ines.moreau@t02.example.com"], subject="Invoice",
                 content="The invoice is attached."),
            final("Sent.", "I emailed Ines Moreau about the invoice.")]


def t5_bad():
    return [call("Send it directly.", "Emails__send_email", recipients=["Ines Moreau"], subject="Invoice",
                 content="The invoice is attached."),
            final("The send failed.", "The email could not be sent.")]


def t6():
    return [call("Search Paris contacts.", "Contacts__search_contacts", query="Paris"),
            final("Jules looks oldest.", "Jules Martin")]


def ranking(**entries):
    return json.dumps({sid: [why, score] for sid, (why, score) in entries.items()})


ERL_RANKINGS = {
    "T1": ranking(S1=("Same reschedule pattern; the original event must be removed.", 95),
                  S6=("Deleting every matching event and verifying is relevant.", 60),
                  S5=("Date handling for calendar tasks.", 25)),
    "T2": ranking(S2=("Email addressed by names; resolve recipients first.", 96),
                  S4=("Resolving a contact before sending.", 80),
                  S3=("Contact lookups.", 20)),
    "T3": ranking(S1=("Replacing events is create plus delete of the original.", 92),
                  S6=("Multiple matching events must all be handled.", 75),
                  S5=("Next month is a relative date range.", 55)),
    "T4": ranking(S3=("Counting contacts by city.", 97),
                  S4=("Contact lookup.", 30),
                  S2=("Contact resolution.", 15)),
    "T5": ranking(S2=("Email to a named person; resolve the address.", 94),
                  S4=("Resolve then send.", 90),
                  S3=("Contacts search.", 10)),
    "T6": ranking(S3=("Filtering contacts by city.", 85),
                  S5=("Reading answers carefully.", 20),
                  S4=("Contact lookup.", 15)),
}

ITERATIVE_RANKINGS = {
    "S2": ranking(S1=("Only lesson available.", 40)),
    "S3": ranking(S2=("Contacts related.", 50), S1=("Calendar, less related.", 10)),
    "S4": ranking(S2=("Email to a named contact.", 90), S3=("Contact lookup.", 40), S1=("Unrelated.", 5)),
    "S5": ranking(S1=("Calendar dates.", 60), S4=("Unrelated.", 10), S3=("Unrelated.", 5)),
    "S6": ranking(S1=("Calendar edits need verification.", 80), S5=("Calendar queries.", 40),
                  S2=("Unrelated.", 5)),
}


def source_sessions(with_assess):
    sessions = {}
    for sid, turns in ROLLOUT_SOURCE.items():
        sessions[f"rollout/{sid}"] = turns
        sessions[f"reflect/{sid}"] = [REFLECTIONS[sid]]
        if with_assess:
            sessions[f"assess/{sid}"] = [ASSESSMENTS[sid]]
    return sessions


def main():
    for uid, u in universes().items():
        dump(f"data/universes/{uid}.json", u)
    dump("data/demo/source_scenarios.json", {"scenarios": SOURCE})
    dump("data/demo/test_scenarios.json", {"scenarios": TEST})

    dump("data/demo/accumulate.script.json", {"sessions": source_sessions(with_assess=True)})

    iterative = source_sessions(with_assess=False)
    for sid, text in ITERATIVE_RANKINGS.items():
        iterative[f"retrieve/{sid}"] = [text]
    dump("data/demo/iterative.script.json", {"sessions": iterative})

    baseline = {
        "rollout/T1": t1_baseline() * 3,
        "rollout/T2": t2_baseline() * 3,
        "rollout/T3": t3(erl=False) * 3,
        "rollout/T4": t4() * 3,
        "rollout/T5": t5_good(erl=False) * 2 + t5_bad(),
        "rollout/T6": t6() * 3,
    }
    dump("data/demo/baseline.script.json", {"sessions": baseline})

    erl = {
        "rollout/T1": t1_erl() * 3,
        "rollout/T2": t2_erl() * 3,
        "rollout/T3": t3(erl=True) * 3,
        "rollout/T4": t4() * 3,
        "rollout/T5": t5_good(erl=True) * 3,
        "rollout/T6": t6() * 3,
    }
    for sid, text in ERL_RANKINGS.items():
        erl[f"retrieve/{sid}"] = [text]
    dump("data/demo/erl.script.json", {"sessions": erl})


if __name__ == "__main__":
    main()
