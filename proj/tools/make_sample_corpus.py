#!/usr/bin/env python3
"""Writes the bundled MultiWOZ-format sample corpora.

  data/sample_multiwoz/      25 compilable dialogues over all five domains, one
                             dialogue touching hospital, one mentioning a
                             restaurant the database does not have
  data/sample_multiwoz_mini/ the first three dialogues of the above
  data/sample_db/            12 database records plus the taxi vocabulary

Booking references and taxi details are recomputed here from the same hash
recipe the GUI uses, so the system utterances quote what the screen shows.

usage: make_sample_corpus.py [--db data/db] [--out data]
"""

import argparse
import json
from pathlib import Path

MASK = (1 << 64) - 1

BOOK_SLOTS = {
    "restaurant": ("people", "day", "time"),
    "hotel": ("people", "day", "stay"),
    "train": ("people",),
    "attraction": (),
    "taxi": (),
}
SEMI_SLOTS = {
    "restaurant": ("food", "pricerange", "name", "area"),
    "hotel": ("name", "area", "parking", "pricerange", "stars", "internet", "type"),
    "attraction": ("type", "name", "area"),
    "train": ("leaveAt", "destination", "day", "arriveBy", "departure"),
    "taxi": ("leaveAt", "destination", "departure", "arriveBy"),
    "hospital": ("department",),
    "police": (),
}


def splitmix64(x):
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


class Hasher:
    def __init__(self):
        self.state = 0xCBF29CE484222325

    def field(self, s):
        for b in str(s).encode() + b"\x1f":
            self.state ^= b
            self.state = (self.state * 0x100000001B3) & MASK
        return self

    def digest(self):
        return splitmix64(self.state)


def base36(v):
    digits = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    out = ""
    while True:
        out = digits[v % 36] + out
        v //= 36
        if v == 0:
            return out


def booking_reference(dialogue_id, domain, turn_index):
    code = base36(Hasher().field("booking").field(dialogue_id).field(domain).field(turn_index).digest())
    return code.rjust(13, "0")[-8:]


def taxi(db, dialogue_id, fields):
    h = Hasher().field("taxi").field(dialogue_id)
    for slot in sorted(fields):
        value = " ".join(fields[slot].lower().split())
        if value:
            h.field(slot).field(value)
    state = h.digest()

    def nxt():
        nonlocal state
        state = (state + 0x9E3779B97F4A7C15) & MASK
        return splitmix64(state)

    colors, types = db["taxi"]["taxi_colors"], db["taxi"]["taxi_types"]
    car = colors[nxt() % len(colors)] + " " + types[nxt() % len(types)]
    phone = "0" + "".join(str(nxt() % 10) for _ in range(10))
    return car, phone


def empty_metadata():
    md = {}
    for d, semi in SEMI_SLOTS.items():
        md[d] = {"book": {"booked": []}, "semi": {s: "not mentioned" for s in semi}}
        for s in BOOK_SLOTS.get(d, ()):
            md[d]["book"][s] = ""
    return md


class Dialogue:
    """Accumulates a dialogue turn pair by turn pair. System texts and act
    values may use {ref:<domain>}, {car} and {taxiphone} placeholders."""

    def __init__(self, db, did, goal):
        self.db, self.did = db, did
        self.goal = {d: {} for d in SEMI_SLOTS}
        for d in goal:
            self.goal[d] = {"info": {}}
        self.state = {}
        self.log = []

    def pair(self, user, system, state=None, acts=None):
        for domain, slots in (state or {}).items():
            self.state.setdefault(domain, {}).update(slots)
        turn_index = len(self.log) + 1
        subst = {"car": "", "taxiphone": ""}
        for d in ("restaurant", "hotel", "train"):
            subst["ref:" + d] = booking_reference(self.did, d, turn_index)
        t = self.state.get("taxi", {})
        if t.get("departure") and t.get("destination"):
            subst["car"], subst["taxiphone"] = taxi(self.db, self.did, t)

        def fill(s):
            for k, v in subst.items():
                s = s.replace("{" + k + "}", v)
            return s

        md = empty_metadata()
        for domain, slots in self.state.items():
            for slot, value in slots.items():
                part = "book" if slot in BOOK_SLOTS.get(domain, ()) else "semi"
                md[domain][part][slot] = value
        act_json = {}
        for key, pairs in (acts or {}).items():
            act_json[key] = [[s, fill(v)] for s, v in pairs]
        self.log.append({"text": user, "metadata": {}, "dialog_act": {}})
        self.log.append({"text": fill(system), "metadata": md, "dialog_act": act_json})
        return self

    def json(self):
        return {"goal": self.goal, "log": self.log}


class Db:
    def __init__(self, root):
        self.data = {}
        for d in ("restaurant", "hotel", "attraction", "train"):
            self.data[d] = json.loads((root / f"{d}_db.json").read_text())
        self.data["taxi"] = json.loads((root / "taxi_db.json").read_text())

    def __getitem__(self, d):
        return self.data[d]

    def find(self, domain, **kw):
        rows = [r for r in self.data[domain] if all(str(r.get(k, "")).lower() == v for k, v in kw.items())]
        if not rows:
            raise SystemExit(f"sample corpus: no {domain} matches {kw}")
        return sorted(rows, key=lambda r: r.get("name", r.get("trainID", "")))[0]

    def train(self, departure, destination, day, after):
        rows = [
            r
            for r in self.data["train"]
            if r["departure"] == departure and r["destination"] == destination and r["day"] == day
            and r["leaveAt"] >= after
        ]
        if not rows:
            raise SystemExit(f"sample corpus: no train {departure}->{destination} {day} after {after}")
        return min(rows, key=lambda r: (r["leaveAt"], r["trainID"]))


def restaurant_dialogues(db):
    out = []

    d = Dialogue(db, "MUL0001", ["restaurant", "hotel"])
    d.pair(
        "I am looking for an expensive restaurant in the centre that serves indian food.",
        "There are 6 expensive indian restaurants in the centre. Do you have a preference?",
        {"restaurant": {"food": "indian", "pricerange": "expensive", "area": "centre"}},
        {"Restaurant-Inform": [["Choice", "6"], ["Food", "indian"], ["Price", "expensive"], ["Area", "centre"]]},
    )
    sb = db.find("restaurant", name="saffron brasserie")
    d.pair(
        "Saffron brasserie sounds good. Please book a table for 6 people at 19:30 on saturday.",
        "I have booked saffron brasserie for 6 people at 19:30 on saturday. Your reference number is {ref:restaurant}.",
        {"restaurant": {"people": "6", "day": "saturday", "time": "19:30"}},
        {"Booking-Book": [["Ref", "{ref:restaurant}"], ["Name", "saffron brasserie"]]},
    )
    h = db.find("hotel", area="centre", parking="yes", type="hotel")
    d.pair(
        "I also need a hotel in the centre with free parking.",
        f"{h['name']} is a {h['stars']} star hotel in the centre with free parking. Their phone number is {h['phone']}.",
        {"hotel": {"area": "centre", "parking": "yes", "type": "hotel"}},
        {"Hotel-Inform": [["Name", h["name"]], ["Stars", h["stars"]], ["Phone", h["phone"]], ["Parking", "none"]]},
    )
    d.pair(
        "Please book it for 6 people for 2 nights starting saturday.",
        "Your room at " + h["name"] + " is booked. The reference number is {ref:hotel}.",
        {"hotel": {"people": "6", "day": "saturday", "stay": "2"}},
        {"Booking-Book": [["Ref", "{ref:hotel}"]]},
    )
    d.pair("That is all, thank you.", "You are welcome. Enjoy your stay.", None, {"general-bye": [["none", "none"]]})
    out.append(d)
    assert sb

    r = db.find("restaurant", food="chinese", pricerange="cheap", area="centre")
    d = Dialogue(db, "SNG0102", ["restaurant"])
    d.pair(
        "Can you find me a cheap chinese restaurant in the centre?",
        f"I recommend {r['name']}. It is located at {r['address']}.",
        {"restaurant": {"food": "chinese", "pricerange": "cheap", "area": "centre"}},
        {"Restaurant-Recommend": [["Name", r["name"]], ["Addr", r["address"]]]},
    )
    d.pair(
        "What is their postcode?",
        f"The postcode is {r['postcode']}.",
        None,
        {"Restaurant-Inform": [["Post", r["postcode"]]]},
    )
    out.append(d)

    r = db.find("restaurant", food="italian", area="north")
    d = Dialogue(db, "SNG0103", ["restaurant"])
    d.pair(
        "I want italian food in the north of town.",
        f"{r['name']} serves italian food in the north. Would you like a table?",
        {"restaurant": {"food": "italian", "area": "north"}},
        {"Restaurant-Inform": [["Name", r["name"]], ["Food", "italian"], ["Area", "north"]]},
    )
    d.pair(
        "Yes, a table for 2 on friday at 18:00 please.",
        "Done. Your table at " + r["name"] + " is reserved, reference {ref:restaurant}.",
        {"restaurant": {"name": r["name"], "people": "2", "day": "friday", "time": "18:00"}},
        {"Booking-Book": [["Ref", "{ref:restaurant}"]], "Restaurant-Inform": [["Name", r["name"]]]},
    )
    out.append(d)

    r = db.find("restaurant", pricerange="moderate", area="west")
    d = Dialogue(db, "SNG0104", ["restaurant"])
    d.pair(
        "Is there a moderately priced restaurant in the west?",
        f"Yes, {r['name']} serves {r['food']} food. Their phone number is {r['phone']}.",
        {"restaurant": {"pricerange": "moderate", "area": "west"}},
        {"Restaurant-Inform": [["Name", r["name"]], ["Food", r["food"]], ["Phone", r["phone"]]]},
    )
    d.pair(
        "Actually, I would prefer something cheap.",
        "There are several cheap restaurants in the west. Any cuisine in mind?",
        {"restaurant": {"pricerange": "cheap"}},
        {"Restaurant-Request": [["Food", "?"]]},
    )
    out.append(d)

    r = db.find("restaurant", food="british", pricerange="expensive")
    d = Dialogue(db, "SNG0105", ["restaurant"])
    d.pair(
        "I would like an expensive british restaurant.",
        "Which area would you like?",
        {"restaurant": {"food": "british", "pricerange": "expensive"}},
        {"Restaurant-Request": [["Area", "?"]]},
    )
    d.pair(
        f"Any area is fine. Is {r['name']} available for 4 people on sunday at 12:15?",
        f"I booked {r['name']} for 4 people on sunday at 12:15. Your reference number is " + "{ref:restaurant}.",
        {"restaurant": {"area": "dontcare", "people": "4", "day": "sunday", "time": "12:15", "name": r["name"]}},
        {"Booking-Book": [["Ref", "{ref:restaurant}"], ["Name", r["name"]]]},
    )
    out.append(d)
    return out


def hotel_dialogues(db):
    out = []
    h = db.find("hotel", type="guesthouse", area="north", internet="yes", pricerange="moderate")
    d = Dialogue(db, "SNG0201", ["hotel"])
    d.pair(
        "I need a moderately priced guesthouse in the north with internet.",
        f"{h['name']} is a moderately priced guesthouse in the north with free wifi.",
        {"hotel": {"type": "guesthouse", "area": "north", "internet": "yes", "pricerange": "moderate"}},
        {"Hotel-Inform": [["Name", h["name"]], ["Internet", "none"]]},
    )
    d.pair(
        "Great, book it for 3 people for 4 nights from tuesday.",
        "Booking was successful. Reference number is {ref:hotel}.",
        {"hotel": {"people": "3", "day": "tuesday", "stay": "4"}},
        {"Booking-Book": [["Ref", "{ref:hotel}"]]},
    )
    out.append(d)

    h = db.find("hotel", stars="4", area="east")
    d = Dialogue(db, "SNG0202", ["hotel"])
    d.pair(
        "Find me a 4 star place in the east.",
        f"I found {h['name']}. The address is {h['address']}.",
        {"hotel": {"stars": "4", "area": "east"}},
        {"Hotel-Inform": [["Name", h["name"]], ["Addr", h["address"]]]},
    )
    out.append(d)

    h = db.find("hotel", type="hotel", pricerange="expensive", area="south")
    d = Dialogue(db, "SNG0203", ["hotel"])
    d.pair(
        "I'd like an expensive hotel.",
        "What area do you prefer?",
        {"hotel": {"pricerange": "expensive", "type": "hotel"}},
        {"Hotel-Request": [["Area", "?"]]},
    )
    d.pair(
        "The south, please.",
        f"{h['name']} is in the south. Their postcode is {h['postcode']}.",
        {"hotel": {"area": "south"}},
        {"Hotel-Inform": [["Name", h["name"]], ["Post", h["postcode"]]]},
    )
    d.pair(
        "Book a room for 1 person, 3 nights from monday.",
        "You're all set, the reference number is {ref:hotel}.",
        {"hotel": {"people": "1", "day": "monday", "stay": "3"}},
        {"Booking-Book": [["Ref", "{ref:hotel}"]]},
    )
    out.append(d)

    h = db.find("hotel", area="west", pricerange="cheap")
    d = Dialogue(db, "SNG0204", ["hotel"])
    d.pair(
        "Anything cheap in the west?",
        f"{h['name']} is cheap and in the west. Would you like me to book it?",
        {"hotel": {"area": "west", "pricerange": "cheap"}},
        {"Hotel-Inform": [["Name", h["name"]]], "Booking-Inform": [["none", "none"]]},
    )
    d.pair(
        "Not now, but can I get the phone number?",
        f"Sure, it is {h['phone']}.",
        None,
        {"Hotel-Inform": [["Phone", h["phone"]]]},
    )
    out.append(d)
    return out


def attraction_dialogues(db):
    out = []
    a = db.find("attraction", type="museum", area="centre")
    d = Dialogue(db, "SNG0301", ["attraction"])
    d.pair(
        "Are there any museums in the centre?",
        f"{a['name']} is a museum in the centre. Entrance is {a['entrance fee']}.",
        {"attraction": {"type": "museum", "area": "centre"}},
        {"Attraction-Inform": [["Name", a["name"]], ["Fee", a["entrance fee"]]]},
    )
    out.append(d)

    a = db.find("attraction", type="college")
    d = Dialogue(db, "SNG0302", ["attraction"])
    d.pair(
        "I want to visit a college.",
        f"How about {a['name']}? It is in the {a['area']}.",
        {"attraction": {"type": "college"}},
        {"Attraction-Recommend": [["Name", a["name"]], ["Area", a["area"]]]},
    )
    d.pair(
        "What's the phone number and postcode?",
        f"The phone number is {a['phone']} and the postcode is {a['postcode']}.",
        None,
        {"Attraction-Inform": [["Phone", a["phone"]], ["Post", a["postcode"]]]},
    )
    out.append(d)

    a = db.find("attraction", type="swimmingpool")
    d = Dialogue(db, "SNG0303", ["attraction"])
    d.pair(
        "Is there a swimming pool in town?",
        f"{a['name']} is a pool in the {a['area']}.",
        {"attraction": {"type": "swimming pool"}},
        {"Attraction-Inform": [["Name", a["name"]], ["Area", a["area"]]]},
    )
    out.append(d)

    a = db.find("attraction", type="park", area="south")
    d = Dialogue(db, "SNG0304", ["attraction"])
    d.pair(
        "I'm looking for a park.",
        "Which part of town?",
        {"attraction": {"type": "park"}},
        {"Attraction-Request": [["Area", "?"]]},
    )
    d.pair(
        "South please.",
        f"{a['name']} is at {a['address']}.",
        {"attraction": {"area": "south"}},
        {"Attraction-Inform": [["Name", a["name"]], ["Addr", a["address"]]]},
    )
    out.append(d)
    return out


def train_dialogues(db):
    out = []
    t = db.train("cambridge", "london kings cross", "wednesday", "09:00")
    d = Dialogue(db, "SNG0401", ["train"])
    d.pair(
        "I need a train from cambridge to london kings cross on wednesday after 09:00.",
        f"{t['trainID']} leaves at {t['leaveAt']} and arrives by {t['arriveBy']}. Shall I book it?",
        {"train": {"departure": "cambridge", "destination": "london kings cross", "day": "wednesday",
                   "leaveAt": "09:00"}},
        {"Train-Inform": [["Id", t["trainID"]], ["Leave", t["leaveAt"]], ["Arrive", t["arriveBy"]]]},
    )
    d.pair(
        "Yes, for 2 people.",
        "Booked. Reference number {ref:train}, total fee " + t["price"] + ".",
        {"train": {"people": "2"}},
        {"Train-OfferBooked": [["Ref", "{ref:train}"], ["Ticket", t["price"]]]},
    )
    out.append(d)

    t = db.train("norwich", "cambridge", "friday", "12:00")
    d = Dialogue(db, "SNG0402", ["train"])
    d.pair(
        "Are there trains from norwich to cambridge on friday?",
        "What time would you like to leave?",
        {"train": {"departure": "norwich", "destination": "cambridge", "day": "friday"}},
        {"Train-Request": [["Leave", "?"]]},
    )
    d.pair(
        "After 12:00.",
        f"{t['trainID']} departs at {t['leaveAt']}.",
        {"train": {"leaveAt": "12:00"}},
        {"Train-Inform": [["Id", t["trainID"]], ["Leave", t["leaveAt"]]]},
    )
    out.append(d)

    t = db.train("cambridge", "stansted airport", "sunday", "16:00")
    d = Dialogue(db, "SNG0403", ["train"])
    d.pair(
        "Book me a train to stansted airport from cambridge on sunday leaving after 16:00 for 1 person.",
        f"I booked {t['trainID']}, leaving at {t['leaveAt']}. Your reference is " + "{ref:train}.",
        {"train": {"departure": "cambridge", "destination": "stansted airport", "day": "sunday",
                   "leaveAt": "16:00", "people": "1"}},
        {"Train-OfferBooked": [["Id", t["trainID"]], ["Leave", t["leaveAt"]], ["Ref", "{ref:train}"]]},
    )
    out.append(d)

    t = db.train("peterborough", "cambridge", "monday", "00:00")
    late = [r for r in db["train"] if r["departure"] == "peterborough" and r["destination"] == "cambridge"
            and r["day"] == "monday" and r["arriveBy"] <= "10:00"]
    t = max(late, key=lambda r: (r["arriveBy"], r["trainID"]))
    d = Dialogue(db, "SNG0404", ["train"])
    d.pair(
        "I need to get from peterborough to cambridge on monday, arriving by 10:00.",
        f"{t['trainID']} arrives at {t['arriveBy']}. The price is {t['price']}.",
        {"train": {"departure": "peterborough", "destination": "cambridge", "day": "monday", "arriveBy": "10:00"}},
        {"Train-Inform": [["Id", t["trainID"]], ["Arrive", t["arriveBy"]], ["Ticket", t["price"]]]},
    )
    out.append(d)
    return out


def taxi_dialogues(db):
    out = []
    r = db.find("restaurant", name="pizza hut city centre")
    a = db.find("attraction", type="museum", area="centre")
    d = Dialogue(db, "SNG0501", ["taxi"])
    d.pair(
        f"I need a taxi from {r['name']} to {a['name']}, leaving at 14:30.",
        "Your taxi is booked: a {car}, contact number {taxiphone}.",
        {"taxi": {"departure": r["name"], "destination": a["name"], "leaveAt": "14:30"}},
        {"Taxi-Inform": [["Car", "{car}"], ["Phone", "{taxiphone}"]]},
    )
    out.append(d)

    h = db.find("hotel", area="east", stars="4")
    d = Dialogue(db, "SNG0502", ["taxi"])
    d.pair(
        f"Can you get me a taxi to {h['name']}?",
        "Where will you be departing from?",
        {"taxi": {"destination": h["name"]}},
        {"Taxi-Request": [["Depart", "?"]]},
    )
    d.pair(
        "From the train station, I want to arrive by 20:00.",
        "A {car} will pick you up. The contact number is {taxiphone}.",
        {"taxi": {"departure": "cambridge train station", "arriveBy": "20:00"}},
        {"Taxi-Inform": [["Car", "{car}"], ["Phone", "{taxiphone}"]]},
    )
    out.append(d)

    d = Dialogue(db, "SNG0503", ["taxi"])
    d.pair(
        "I need a taxi from the botanic gardens to the grafton hotel at 08:15.",
        "I booked a {car} for you. Their number is {taxiphone}.",
        {"taxi": {"departure": "cambridge university botanic gardens", "destination": "the grafton hotel",
                  "leaveAt": "08:15"}},
        {"Taxi-Inform": [["Car", "{car}"], ["Phone", "{taxiphone}"]]},
    )
    out.append(d)
    return out


def multi_domain_dialogues(db):
    out = []
    a = db.find("attraction", type="theatre")
    r = db.find("restaurant", food="european", area=a["area"])
    d = Dialogue(db, "MUL0002", ["attraction", "taxi"])
    d.pair(
        "I'd like to see a theatre.",
        f"{a['name']} is a theatre in the {a['area']}. The address is {a['address']}.",
        {"attraction": {"type": "theatre"}},
        {"Attraction-Inform": [["Name", a["name"]], ["Area", a["area"]], ["Addr", a["address"]]]},
    )
    d.pair(
        f"I'll need a taxi from {a['name']} to {r['name']} at 22:00.",
        "Booked: a {car}, phone {taxiphone}.",
        {"taxi": {"departure": a["name"], "destination": r["name"], "leaveAt": "22:00"}},
        {"Taxi-Inform": [["Car", "{car}"], ["Phone", "{taxiphone}"]]},
    )
    out.append(d)

    t = db.train("london liverpool street", "cambridge", "thursday", "08:00")
    h = db.find("hotel", type="guesthouse", area="south")
    d = Dialogue(db, "MUL0003", ["train", "hotel"])
    d.pair(
        "I need a train from london liverpool street to cambridge on thursday, leaving after 08:00.",
        f"{t['trainID']} leaves at {t['leaveAt']}. How many tickets?",
        {"train": {"departure": "london liverpool street", "destination": "cambridge", "day": "thursday",
                   "leaveAt": "08:00"}},
        {"Train-Inform": [["Id", t["trainID"]], ["Leave", t["leaveAt"]]], "Train-Request": [["People", "?"]]},
    )
    d.pair(
        "3 tickets please. I also need a guesthouse in the south.",
        "Your train is booked, reference {ref:train}. " + f"{h['name']} is a guesthouse in the south.",
        {"train": {"people": "3"}, "hotel": {"type": "guesthouse", "area": "south"}},
        {"Train-OfferBooked": [["Ref", "{ref:train}"]], "Hotel-Inform": [["Name", h["name"]]]},
    )
    d.pair(
        "Book the guesthouse for 3 people for 2 nights from thursday.",
        "Done, reference number {ref:hotel}.",
        {"hotel": {"people": "3", "day": "thursday", "stay": "2"}},
        {"Booking-Book": [["Ref", "{ref:hotel}"]]},
    )
    out.append(d)

    r = db.find("restaurant", food="thai", area="centre")
    a = db.find("attraction", type="nightclub", area="centre")
    d = Dialogue(db, "MUL0004", ["restaurant", "attraction", "taxi"])
    d.pair(
        "Find a thai restaurant in the centre.",
        f"{r['name']} serves thai food in the centre.",
        {"restaurant": {"food": "thai", "area": "centre"}},
        {"Restaurant-Inform": [["Name", r["name"]]]},
    )
    d.pair(
        "Book it for 2 at 20:00 on friday. Also, any nightclubs nearby?",
        "Your table is reserved, reference {ref:restaurant}. " + f"{a['name']} is a nightclub in the centre.",
        {"restaurant": {"people": "2", "day": "friday", "time": "20:00"},
         "attraction": {"type": "nightclub", "area": "centre"}},
        {"Booking-Book": [["Ref", "{ref:restaurant}"]], "Attraction-Inform": [["Name", a["name"]]]},
    )
    d.pair(
        f"I need a taxi from {r['name']} to {a['name']} leaving at 22:30.",
        "A {car} will collect you. Contact number {taxiphone}.",
        {"taxi": {"departure": r["name"], "destination": a["name"], "leaveAt": "22:30"}},
        {"Taxi-Inform": [["Car", "{car}"], ["Phone", "{taxiphone}"]]},
    )
    out.append(d)

    h = db.find("hotel", name="acorn guest house")
    t = db.train("cambridge", "birmingham new street", "saturday", "10:00")
    d = Dialogue(db, "MUL0005", ["hotel", "train"])
    d.pair(
        "I'm looking for acorn guest house.",
        f"acorn guest house is in the {h['area']}, phone {h['phone']}.",
        {"hotel": {"name": "acorn guest house"}},
        {"Hotel-Inform": [["Name", "acorn guest house"], ["Area", h["area"]], ["Phone", h["phone"]]]},
    )
    d.pair(
        "Thanks. I also need a train from cambridge to birmingham new street on saturday after 10:00.",
        f"{t['trainID']} leaves at {t['leaveAt']}.",
        {"train": {"departure": "cambridge", "destination": "birmingham new street", "day": "saturday",
                   "leaveAt": "10:00"}},
        {"Train-Inform": [["Id", t["trainID"]], ["Leave", t["leaveAt"]]]},
    )
    out.append(d)

    r = db.find("restaurant", food="gastropub", pricerange="expensive")
    h = db.find("hotel", area="centre", type="guesthouse")
    d = Dialogue(db, "MUL0006", ["restaurant", "hotel"])
    d.pair(
        "Is there an expensive gastropub?",
        f"{r['name']} is an expensive gastropub in the {r['area']}.",
        {"restaurant": {"food": "gastropub", "pricerange": "expensive"}},
        {"Restaurant-Inform": [["Name", r["name"]], ["Area", r["area"]]]},
    )
    d.pair(
        "What's their phone number? And I need a guesthouse in the centre.",
        f"The phone number is {r['phone']}. {h['name']} is a guesthouse in the centre.",
        {"hotel": {"type": "guesthouse", "area": "centre"}},
        {"Restaurant-Inform": [["Phone", r["phone"]]], "Hotel-Inform": [["Name", h["name"]]]},
    )
    out.append(d)
    return out


def excluded_dialogues(db):
    out = []
    d = Dialogue(db, "SNG0601", ["hospital"])
    d.pair(
        "I need the addenbrookes hospital paediatric department.",
        "The paediatric department phone number is 01223217413.",
        {"hospital": {"department": "paediatric day unit"}},
        {"Hospital-Inform": [["Phone", "01223217413"]]},
    )
    out.append(d)

    d = Dialogue(db, "SNG0602", ["restaurant"])
    d.pair(
        "Can you find the restaurant called moonlight noodle bar?",
        "moonlight noodle bar serves noodles in the centre.",
        {"restaurant": {"area": "centre"}},
        {"Restaurant-Inform": [["Name", "moonlight noodle bar"]]},
    )
    out.append(d)
    return out


def write_corpus(dirpath, dialogues, dev, test):
    dirpath.mkdir(parents=True, exist_ok=True)
    data = {d.did + ".json": d.json() for d in dialogues}
    (dirpath / "data.json").write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
    ids = {d.did for d in dialogues}
    (dirpath / "valListFile.txt").write_text("".join(f"{i}.json\n" for i in dev if i in ids))
    (dirpath / "testListFile.txt").write_text("".join(f"{i}.json\n" for i in test if i in ids))


SAMPLE_DB = {
    "restaurant": ["curry garden", "saffron brasserie", "pizza hut city centre", "golden wok"],
    "hotel": ["acorn guest house", "gonville hotel", "a and b guest house"],
    "attraction": ["all saints church", "abbey pool and astroturf pitch"],
    "train": ["TR7075", "TR2289", "TR5167"],
}


def write_sample_db(db, dirpath):
    dirpath.mkdir(parents=True, exist_ok=True)
    for domain, keys in SAMPLE_DB.items():
        key = "trainID" if domain == "train" else "name"
        rows = [next(r for r in db[domain] if r[key] == k) for k in keys]
        (dirpath / f"{domain}_db.json").write_text(json.dumps(rows, indent=1) + "\n")
    (dirpath / "taxi_db.json").write_text(json.dumps(db["taxi"], indent=1) + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--db", default="data/db", type=Path)
    ap.add_argument("--out", default="data", type=Path)
    args = ap.parse_args()

    db = Db(args.db)
    compilable = (restaurant_dialogues(db) + hotel_dialogues(db) + attraction_dialogues(db) +
                  train_dialogues(db) + taxi_dialogues(db) + multi_domain_dialogues(db))
    dev = ["SNG0104", "SNG0202", "SNG0402", "MUL0003"]
    test = ["SNG0105", "SNG0303", "SNG0502", "MUL0005"]
    write_corpus(args.out / "sample_multiwoz", compilable + excluded_dialogues(db), dev, test)
    write_corpus(args.out / "sample_multiwoz_mini", compilable[:3], dev, test)
    write_sample_db(db, args.out / "sample_db")


if __name__ == "__main__":
    main()
