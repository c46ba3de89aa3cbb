"""Seeded synthetic Bengali corpora for experiments and tests.

Sentences are bags of category keywords with a fraction of words drawn
from a shared, category-neutral pool, closed by an inflected verb and a
danda.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

DEFAULT_CATEGORIES = (
    "art & culture", "economics", "entertainment", "literature",
    "politics", "sports", "tourism",
)

KEYWORDS = {
    "art & culture": """শিল্পী চিত্রকলা ভাস্কর্য প্রদর্শনী সংস্কৃতি লোকনৃত্য মন্দির ঐতিহ্য
        উৎসব তুলি মূর্তি নকশা কারুশিল্প আলপনা পটচিত্র সংগ্রহশালা জাদুঘর শিল্পকলা
        লোকসংগীত বাউল পুতুলনাচ টেরাকোটা""",
    "economics": """অর্থনীতি বাজার মুদ্রাস্ফীতি ব্যাংক সুদ বাজেট রপ্তানি আমদানি শেয়ার
        বিনিয়োগ কর রাজস্ব মূলধন শিল্পায়ন কারখানা উৎপাদন চাহিদা জোগান টাকা ঋণ
        মুনাফা ব্যবসা দাম বাণিজ্য""",
    "entertainment": """চলচ্চিত্র সিনেমা অভিনেতা অভিনেত্রী পরিচালক গায়ক নায়ক নায়িকা
        দর্শক টেলিভিশন ধারাবাহিক মুক্তি বক্সঅফিস সুরকার প্রেক্ষাগৃহ শুটিং চিত্রনাট্য
        বলিউড টলিউড রিয়েলিটি ট্রেলার সংলাপ প্রযোজক গান""",
    "literature": """উপন্যাস কবিতা কবি লেখক ছোটগল্প প্রবন্ধ সাহিত্য কাব্য ছন্দ প্রকাশক
        বইমেলা পাণ্ডুলিপি চরিত্র রবীন্দ্রনাথ নজরুল গ্রন্থ পত্রিকা সম্পাদক অনুবাদ
        পাঠক রচনা গীতাঞ্জলি আত্মজীবনী উপাখ্যান""",
    "politics": """নির্বাচন সরকার মন্ত্রী সংসদ ভোট প্রধানমন্ত্রী বিধানসভা বিরোধী নেতা
        প্রার্থী আইন সংবিধান রাষ্ট্রপতি জোট কমিশন মুখ্যমন্ত্রী প্রচার আসন সাংসদ
        বিধায়ক শাসন নীতি আন্দোলন রাজনীতি""",
    "sports": """ক্রিকেট ফুটবল খেলোয়াড় গোল রান উইকেট ম্যাচ টুর্নামেন্ট অধিনায়ক কোচ
        স্টেডিয়াম বিশ্বকাপ আইপিএল সেঞ্চুরি ব্যাটসম্যান বোলার রেফারি হকি টেনিস
        অলিম্পিক পদক দৌড় লিগ ক্লাব""",
    "tourism": """পর্যটন পর্যটক ভ্রমণ হোটেল সমুদ্রসৈকত পাহাড় দার্জিলিং দিঘা সুন্দরবন
        জঙ্গল বেড়ানো টিকিট ট্রেন গাইড রিসর্ট ছুটি দর্শনীয় প্রাসাদ হ্রদ ঝরনা
        অভয়ারণ্য ভিসা বিমান ট্রেকিং""",
}

SUBCATEGORY_KEYWORDS = {
    "sports": {
        "cricket": "ব্যাট বল ইনিংস টেস্ট ওভার ছক্কা চার স্টাম্প",
        "football": "স্ট্রাইকার গোলকিপার পেনাল্টি কর্নার ফরোয়ার্ড ডিফেন্ডার হেড ফ্রিকিক",
    },
    "politics": {
        "national": "লোকসভা কেন্দ্র দিল্লি রাষ্ট্র জাতীয় সাংবিধানিক মন্ত্রক সর্বভারতীয়",
        "state": "পঞ্চায়েত পুরসভা জেলা রাজ্যপাল নবান্ন বিধায়কদের স্থানীয় ব্লক",
    },
}

SHARED = """আজ গতকাল বছর মানুষ নতুন বড় ভালো অনেক সবাই দেশ রাজ্য শহর কলকাতা ভারত
    বাংলা সময় দিন খবর প্রথম শেষ বিশেষ সাধারণ কাজ জীবন সমাজ ইতিহাস""".split()

FUNCTION_WORDS = ["এবং", "এর", "থেকে", "সাথে", "জন্য", "ও"]

VERB_ROOTS = ["কর", "বল", "দেখ", "শুন", "লিখ", "পড়", "খেল", "চল"]
VERB_SUFFIXES = ["ছে", "েছে", "লাম", "লেন", "বে", "তাম", "ছিলাম", "েছিলাম", "েন", "ব"]


def _words(s: str) -> list[str]:
    return s.split()


def generate_sentence(rng: random.Random, pool: list[str], noise: float,
                      min_len: int = 5, max_len: int = 10) -> str:
    n = rng.randint(min_len, max_len)
    words = []
    for _ in range(n):
        words.append(rng.choice(SHARED) if rng.random() < noise else rng.choice(pool))
        if rng.random() < 0.15:
            words.append(rng.choice(FUNCTION_WORDS))
    words.append(rng.choice(VERB_ROOTS) + rng.choice(VERB_SUFFIXES))
    return " ".join(words) + "।"


def generate_corpus(n_per_category: int = 100, noise: float = 0.1, seed: int = 0,
                    categories=DEFAULT_CATEGORIES, hierarchical: bool = False) -> list[dict]:
    """Labeled records ``{"id", "category_path", "text"}``.

    With ``hierarchical`` set, categories that have subcategory pools are
    split evenly across them and their sentences mix in subcategory words.
    """
    rng = random.Random(seed)
    records = []
    for cat in categories:
        pool = _words(KEYWORDS[cat])
        subs = SUBCATEGORY_KEYWORDS.get(cat) if hierarchical else None
        for i in range(n_per_category):
            if subs:
                names = sorted(subs)
                sub = names[i % len(names)]
                sub_pool = _words(subs[sub])
                mixed = pool + sub_pool * 3
                text = generate_sentence(rng, mixed, noise)
                path = [cat, sub]
            else:
                text = generate_sentence(rng, pool, noise)
                path = [cat]
            records.append({"id": f"{cat[:3]}-{i:04d}".replace(" ", "_").replace("&", "n"),
                            "category_path": path, "text": text})
    return records


def generate_total(n: int, noise: float = 0.1, seed: int = 0,
                   categories=DEFAULT_CATEGORIES) -> list[dict]:
    """Exactly ``n`` records spread round-robin over the categories."""
    per = -(-n // len(categories))
    by_cat = [generate_corpus(per, noise, seed + k, (c,)) for k, c in enumerate(categories)]
    out = []
    for i in range(per):
        for recs in by_cat:
            if len(out) < n:
                out.append(recs[i])
    return out


def write_jsonl(records: list[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r, ensure_ascii=False) + "\n")
