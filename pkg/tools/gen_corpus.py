#!/usr/bin/env python3
"""Regenerate src/parley/data/corpus.txt from conversational templates.

The corpus must satisfy two properties the retrieval tests lean on:
unique normalized texts and unique phoneme sequences (no two sentences
may sound identical, or exact-match recovery breaks). Run from the repo
root after editing templates; pass --check-vocab to list words missing
from the lexicon instead of writing.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

FAVORITES = """movie song book color food city season sport animal game show band
place hobby subject snack drink holiday team artist""".split()

LIKEABLES = """coffee tea pizza pasta sushi jazz hiking swimming baseball basketball
soccer tennis winter summer cats dogs cooking reading dancing camping chess
painting running gardening""".split()

PLACES = ["new york", "boston", "chicago", "seattle", "denver", "austin",
          "paris", "london", "tokyo", "canada", "mexico", "italy", "spain",
          "japan", "hawaii", "alaska"]

SPOTS = """airport station harbor stadium museum library market beach park zoo
mall university""".split()

VENUES = """restaurant cafe bakery theater pharmacy bank hotel gym bookstore
diner salon clinic""".split()

WEATHER = """sunny rainy cold warm windy cloudy humid freezing lovely awful
foggy mild""".split()

TOPICS = """history music science politics travel photography astronomy economics
football fashion technology geography chemistry literature""".split()

FAMILY = """brother sister mother father cousin uncle aunt grandmother
grandfather roommate neighbor""".split()

ANIMALS = """cat dog bird horse rabbit turtle hamster parrot goldfish puppy
kitten fox owl deer""".split()

FOODS = """salad soup rice chicken cheese bread pancakes noodles tacos curry
dumplings waffles cookies sandwiches""".split()

DAYS = "monday tuesday wednesday thursday friday saturday sunday".split()

TEMPLATES: list[tuple[str, list[list[str]]]] = [
    ("what is your favorite {0}", [FAVORITES]),
    ("what was your favorite {0} as a kid", [FAVORITES]),
    ("do you like {0}", [LIKEABLES]),
    ("i really enjoy {0}", [LIKEABLES]),
    ("have you ever been to {0}", [PLACES]),
    ("i have never been to {0}", [PLACES]),
    ("my friend just moved to {0}", [PLACES]),
    ("how far is the {0} from here", [SPOTS]),
    ("can you give me directions to the {0}", [SPOTS]),
    ("is there a good {0} near here", [VENUES]),
    ("what time does the {0} open on {1}", [VENUES, DAYS]),
    ("the weather is {0} today", [WEATHER]),
    ("i heard it will be {0} on {1}", [WEATHER, DAYS]),
    ("can you tell me about {0}", [TOPICS]),
    ("what do you think about {0}", [TOPICS]),
    ("i want to learn more about {0}", [TOPICS]),
    ("my {0} loves {1}", [FAMILY, LIKEABLES]),
    ("does your {0} like {1}", [FAMILY, FOODS]),
    ("how is your {0} doing today", [FAMILY]),
    ("do you have a {0}", [ANIMALS]),
    ("my {0} is named after my {1}", [ANIMALS, FAMILY]),
    ("what should i cook for dinner on {0}", [DAYS]),
    ("i made {0} for lunch", [FOODS]),
]

SINGLETONS = """
what is the tallest mountain in the world
what is the deepest part of the ocean
what is the longest river on the planet
what is the capital of france
how do people learn a foreign language so fast
what is the best way to learn a new language
how many stars can we see tonight
is the moon out this evening
will the sun be warm tomorrow morning
what should we do this weekend
my birthday party is next week
i still need to buy a gift for my sister
can you play the guitar or the piano
my cousin plays the violin and the drums
i love to sing in the morning
that joke was really funny
tell me a funny story please
i read the news every morning
the train was late again today
should i take the bus or ride my bike
i want to drive to the beach this weekend
we could walk to the park after lunch
i did not sleep well last night
i had a strange dream about a talking owl
i woke up very early today
i am so tired this afternoon
i am really happy about the game
my neighbor seemed sad this morning
i am excited for the holiday
i was nervous before the show
you should be proud of your team
that was a brave thing to do
the library is very quiet at night
the market gets loud on saturday
my puppy is still very small
that horse is really big
my brother is tall and my sister is short
the fast train leaves at nine
the slow bus stops at every corner
my grandfather tells the best stories
my grandmother bakes bread every sunday
could you repeat the question please
i am thinking about moving to the coast
can i get a glass of water
would you like juice or milk
we made lemonade for the party
what did you eat for breakfast
it is twenty degrees outside
it is warm inside the cafe
is it raining near the harbor
it started snowing on the mountain
the flowers by the river smell lovely
we need flour to bake the cookies
i can see the sea from my window
did you see that scene in the movie
i have seen that show twice
meet me by the station at noon
we had meat and rice for dinner
the knight in the story rides at night
you were right about the weather
i will write a letter to my aunt
the team won the game by one point
two friends came over too
i bought four tickets for the show
whether we go depends on the weather
""".strip().splitlines()


def build_sentences() -> list[str]:
    sentences: list[str] = []
    for template, slot_lists in TEMPLATES:
        for combo in itertools.product(*slot_lists):
            sentences.append(template.format(*combo))
    sentences.extend(line.strip() for line in SINGLETONS if line.strip())
    return sentences


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--check-vocab", action="store_true")
    parser.add_argument("--out", default=os.path.join("src", "parley", "data", "corpus.txt"))
    args = parser.parse_args()

    from parley.config import data_path
    from parley.phonetics import Lexicon
    from parley.repair import normalize_text

    lex = Lexicon.from_files(data_path("lexicon.txt"), data_path("letter_rules.txt"))
    sentences = build_sentences()

    vocab = sorted({w for s in sentences for w in normalize_text(s).split()})
    # digit strings are pronounced by the letter rules on purpose
    missing = [w for w in vocab if w not in lex and not w.isdigit()]
    if args.check_vocab:
        print(f"{len(sentences)} sentences, {len(vocab)} distinct words, {len(missing)} missing")
        for w in missing:
            print("MISSING", w)
        return 1 if missing else 0
    if missing:
        print(f"refusing to write: {len(missing)} words missing from lexicon: {missing[:20]}")
        return 1

    seen_text: set[str] = set()
    seen_phones: set[tuple[str, ...]] = set()
    out_lines: list[str] = []
    dropped = 0
    for s in sentences:
        norm = normalize_text(s)
        phones = tuple(p for w in norm.split() for p in lex.pronounce(w))
        if norm in seen_text or phones in seen_phones:
            dropped += 1
            continue
        seen_text.add(norm)
        seen_phones.add(phones)
        out_lines.append(s)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out_lines) + "\n")
    print(f"wrote {len(out_lines)} sentences to {args.out} ({dropped} duplicates dropped)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
