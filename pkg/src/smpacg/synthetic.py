"""Seeded synthetic corpus: catalog, curated combinations, copy, domain texts.

A small Chinese home/e-commerce world with five topic channels, five detailed
categories per topic and two curated "goes-together" patterns per topic.
Everything is generated from one seed so experiments are reproducible.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import (
    Catalog,
    Combination,
    CopywritingRecord,
    Product,
    TopicRule,
    save_catalog,
    save_combinations,
    save_records,
)
from .enhancement import ForbiddenLexicon, LexiconEntry

# topic -> list of (cid, product word)
TOPIC_CIDS: dict[str, list[tuple[str, str]]] = {
    "客厅": [
        ("c_sofa", "沙发"),
        ("c_teatable", "茶几"),
        ("c_tvstand", "电视柜"),
        ("c_rug", "地毯"),
        ("c_lamp", "落地灯"),
    ],
    "厨房": [
        ("c_filter", "净水器"),
        ("c_fryer", "空气炸锅"),
        ("c_hood", "油烟机"),
        ("c_wok", "炒锅"),
        ("c_oven", "烤箱"),
    ],
    "卧室": [
        ("c_bed", "床架"),
        ("c_mattress", "床垫"),
        ("c_wardrobe", "衣柜"),
        ("c_nightstand", "床头柜"),
        ("c_desklamp", "台灯"),
    ],
    "数码": [
        ("c_phone", "手机"),
        ("c_earphone", "耳机"),
        ("c_charger", "充电器"),
        ("c_speaker", "音箱"),
        ("c_watch", "手表"),
    ],
    "书房": [
        ("c_desk", "书桌"),
        ("c_chair", "座椅"),
        ("c_shelf", "书架"),
        ("c_monitor", "显示器"),
        ("c_keyboard", "键盘"),
    ],
}

# curated complementary pairs per topic, by product word
TRUE_PATTERNS: dict[str, list[tuple[str, str]]] = {
    "客厅": [("沙发", "茶几"), ("电视柜", "地毯")],
    "厨房": [("净水器", "空气炸锅"), ("油烟机", "炒锅")],
    "卧室": [("床架", "床垫"), ("衣柜", "床头柜")],
    "数码": [("手机", "耳机"), ("音箱", "手表")],
    "书房": [("书桌", "座椅"), ("书架", "显示器")],
}

ADJECTIVES = ["简约", "北欧", "现代", "轻奢", "时尚", "舒适", "智能", "家用", "高端", "经典"]
SUFFIXES = ["新款", "升级款", "旗舰版", "尊享版", "精选款"]
SCENES = [
    "忙碌一天回到家",
    "周末的闲暇时光",
    "清晨的第一缕阳光里",
    "夜晚安静下来以后",
    "招待亲朋好友的时候",
]
BENEFITS = [
    "营造温馨的生活氛围",
    "品质感触手可及",
    "每个细节都透着用心",
    "让居家体验焕然一新",
    "点亮对美好生活的向往",
]
FEATURES = ["做工精致", "用料扎实", "性能出色", "经久耐用", "设计感十足"]

DEMO_LEXICON = ForbiddenLexicon(
    entries=(
        LexiconEntry("再加*元", alterable=False),
        LexiconEntry("限时秒杀", alterable=False),
        LexiconEntry("点击购买", alterable=False),
        LexiconEntry("全网最低价", alterable=False),
        LexiconEntry("最好", alterable=True, replacement="很好"),
        LexiconEntry("第一名", alterable=True, replacement="优选"),
        LexiconEntry("完美", alterable=True, replacement="出色"),
    )
)


@dataclass
class SyntheticWorld:
    seed: int
    products: list[Product]
    rules: list[TopicRule]
    combinations: list[Combination]
    records: list[CopywritingRecord]
    domain_corpus: list[str]
    lexicon: ForbiddenLexicon = field(default_factory=lambda: DEMO_LEXICON)

    @property
    def catalog(self) -> Catalog:
        return Catalog(self.products)


def _title(rng: random.Random, word: str) -> str:
    return rng.choice(ADJECTIVES) + rng.choice(ADJECTIVES) + word + rng.choice(SUFFIXES)


def _combo_copy(rng: random.Random, w1: str, w2: str) -> str:
    return (
        f"{rng.choice(SCENES)}，选一款{rng.choice(ADJECTIVES)}{w1}，"
        f"搭配{rng.choice(ADJECTIVES)}{w2}，{rng.choice(BENEFITS)}。"
    )


def build_world(
    seed: int = 0,
    products_per_cid: int = 40,
    n_combinations: int = 300,
    n_domain_texts: int = 500,
) -> SyntheticWorld:
    rng = random.Random(seed)

    products: list[Product] = []
    by_word: dict[str, list[Product]] = {}
    counter = 0
    for topic, cids in TOPIC_CIDS.items():
        for cid, word in cids:
            for _ in range(products_per_cid):
                counter += 1
                p = Product(
                    id=f"p{counter:05d}",
                    title=_title(rng, word),
                    attributes={"风格": rng.choice(ADJECTIVES), "系列": rng.choice(SUFFIXES)},
                    cid=cid,
                    topic=topic,
                    product_words=((word, 1.0),),
                )
                products.append(p)
                by_word.setdefault(word, []).append(p)

    rules = [
        TopicRule(topic=topic, match_cids=tuple(cid for cid, _ in cids))
        for topic, cids in TOPIC_CIDS.items()
    ]

    combinations: list[Combination] = []
    records: list[CopywritingRecord] = []
    topics = list(TRUE_PATTERNS)
    for _ in range(n_combinations):
        topic = rng.choice(topics)
        w1, w2 = rng.choice(TRUE_PATTERNS[topic])
        p1 = rng.choice(by_word[w1])
        p2 = rng.choice(by_word[w2])
        combo = Combination(products=(p1.id, p2.id), topic=topic, provenance="dataset")
        combinations.append(combo)
        records.append(
            CopywritingRecord(
                combination=combo,
                content=_combo_copy(rng, w1, w2),
                title=f"{w1}{w2}组合",
            )
        )

    # two text families: single-product blurbs and scenario texts; together they
    # cover the full character inventory of titles, topics, and copy templates
    all_words = [w for cids in TOPIC_CIDS.values() for _, w in cids]
    domain_corpus = []
    for i in range(n_domain_texts):
        if i % 2 == 0:
            # cycle through the words so every one appears even in tiny corpora
            word = all_words[(i // 2) % len(all_words)]
            domain_corpus.append(
                f"{rng.choice(ADJECTIVES)}{word}{rng.choice(SUFFIXES)}，"
                f"{rng.choice(FEATURES)}，{rng.choice(BENEFITS)}。"
            )
        else:
            topic = rng.choice(topics)
            w1, w2 = rng.choice(TRUE_PATTERNS[topic])
            domain_corpus.append(
                f"{rng.choice(SCENES)}，在{topic}里选一款{rng.choice(ADJECTIVES)}{w1}，"
                f"搭配{rng.choice(ADJECTIVES)}{w2}，{rng.choice(BENEFITS)}。"
            )

    return SyntheticWorld(
        seed=seed,
        products=products,
        rules=rules,
        combinations=combinations,
        records=records,
        domain_corpus=domain_corpus,
    )


def write_world(world: SyntheticWorld, out_dir: str | Path) -> dict[str, Path]:
    """Write all corpus files; returns the path of each artifact."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "catalog": out / "catalog.jsonl",
        "rules": out / "topic_rules.json",
        "combinations": out / "combinations.jsonl",
        "records": out / "records.jsonl",
        "domain_corpus": out / "domain_corpus.txt",
        "lexicon": out / "lexicon.tsv",
    }
    save_catalog(world.catalog, paths["catalog"])
    paths["rules"].write_text(
        json.dumps(
            {
                "rules": [
                    {
                        "topic": r.topic,
                        "match_terms": list(r.match_terms),
                        "match_cids": list(r.match_cids),
                    }
                    for r in world.rules
                ]
            },
            ensure_ascii=False,
            indent=2,
        ),
        encoding="utf-8",
    )
    save_combinations(world.combinations, paths["combinations"])
    save_records(world.records, paths["records"])
    paths["domain_corpus"].write_text(
        "\n".join(world.domain_corpus) + "\n", encoding="utf-8"
    )
    world.lexicon.save(paths["lexicon"])
    return paths
