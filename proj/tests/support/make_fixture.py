#!/usr/bin/env python3
"""Regenerates fixtures/fixture_corpus.jsonl and prints the reference stats.

The quote scanner here is an independent reimplementation of the library's
pairing rules; the numbers this script prints are frozen into the C++ tests,
so regenerate deliberately and re-check the counts when editing articles.
"""

import json
import os

WS = set(" \t\n\r\f\v\xa0　")


def nonspace(s):
    return sum(1 for c in s if c not in WS)


def extract_quotes(text):
    state = 0  # 0 outside, 1 straight, 2 curly
    out = []
    open_i = 0
    for i, ch in enumerate(text):
        if state == 0:
            if ch == '"':
                state, open_i = 1, i + 1
            elif ch == "“":
                state, open_i = 2, i + 1
        elif state == 1:
            if ch == '"':
                if nonspace(text[open_i:i]) >= 2:
                    out.append((open_i, i))
                state = 0
        else:
            if ch == "”":
                if nonspace(text[open_i:i]) >= 2:
                    out.append((open_i, i))
                state = 0
    return out


ARTICLES = [
    dict(
        id="en-001",
        outlet="Daily Ledger",
        published_date="2024-02-06",
        issue_id="med-quota-2024",
        issue_text="Medical School Admissions to Increase by 2,000 Next Year",
        genre="analysis",
        headline='Medical groups warn of "education collapse" as quota expansion advances',
        paragraphs=[
            "The government confirmed on Tuesday that medical school admissions will rise by "
            '2,000 seats next year. Doctors\' associations immediately objected, saying the plan '
            '"ignores training capacity" and warning of a walkout.',
            "Hospital directors were split. One administrator said the increase was "
            '"long overdue reform" while residents called it "a political number detached from '
            'classrooms".',
            "The ministry will publish allocation details next month, and both sides expect the "
            "dispute to continue.",
        ],
        article="oppositional",
        headline_stance="oppositional",
        lead="neutral",
        conclusion="neutral",
        quote_stances=["oppositional", "supportive", "oppositional"],
    ),
    dict(
        id="en-002",
        outlet="Morning Post",
        published_date="2024-02-07",
        issue_id="med-quota-2024",
        issue_text="Medical School Admissions to Increase by 2,000 Next Year",
        genre="opinion",
        headline="The quota increase is twenty years late",
        paragraphs=[
            "Expanding medical school admissions by 2,000 seats is the first serious answer to "
            "collapsing regional care. As one rural hospital chief put it, “we finally "
            "match demand” after two decades of frozen intake.",
            "Implementation details matter, but the direction is correct and overdue.",
        ],
        article="supportive",
        headline_stance="supportive",
        lead="supportive",
        conclusion="neutral",
        quote_stances=["supportive"],
    ),
    dict(
        id="en-003",
        outlet="Daily Ledger",
        published_date="2024-02-09",
        issue_id="med-quota-2024",
        issue_text="Medical School Admissions to Increase by 2,000 Next Year",
        genre="analysis",
        headline="Quota plan advances amid split expert opinion",
        paragraphs=[
            "The 2,000-seat increase cleared another procedural hurdle this week, with "
            "implementation timelines still under discussion.",
            'A public health professor said the expansion was "a necessary correction" to '
            "regional shortages.",
            "Residents' groups countered that the number was \"chosen without a staffing "
            'model".',
            "Allocation by region and specialty will determine the policy's practical effect.",
        ],
        article="neutral",
        headline_stance="neutral",
        lead="neutral",
        conclusion="neutral",
        quote_stances=["supportive", "oppositional"],
    ),
    dict(
        id="en-004",
        outlet="Market Watch KR",
        published_date="2023-11-06",
        issue_id="short-sell-ban-2023",
        issue_text="Short Selling Fully Banned Until June 2025",
        genre="opinion",
        headline="A blunt instrument: the blanket short-selling ban returns",
        paragraphs=[
            "Extending the blanket ban punishes price discovery for the sins of a few bad "
            "desks, and it signals that rules bend to retail sentiment.",
            "Until enforcement targets actual violations instead of the mechanism itself, "
            "Korean markets will keep paying a credibility discount.",
        ],
        article="oppositional",
        headline_stance="oppositional",
        lead="oppositional",
        conclusion="oppositional",
        quote_stances=[],
    ),
    dict(
        id="en-005",
        outlet="Morning Post",
        published_date="2023-11-05",
        issue_id="short-sell-ban-2023",
        issue_text="Short Selling Fully Banned Until June 2025",
        genre="analysis",
        headline="Short-selling ban extended until June",
        paragraphs=[
            "The ban on short selling will stay in place until June while an electronic "
            'monitoring system is built; officials said resumption depends on "verifiable '
            'safeguards" being in place.',
        ],
        article="neutral",
        headline_stance="neutral",
        lead="neutral",
        conclusion=None,
        quote_stances=["neutral"],
    ),
    dict(
        id="en-006",
        outlet="Market Watch KR",
        published_date="2023-11-07",
        issue_id="short-sell-ban-2023",
        issue_text="Short Selling Fully Banned Until June 2025",
        genre="analysis",
        headline="Regulators extend short-selling ban, retail investors cheer",
        paragraphs=[
            "The financial authority extended the full ban on short selling until June, citing "
            "repeated naked short-selling violations by foreign desks. Retail groups called it "
            '"a fair-market reset".',
            'An association spokesperson said the ban "protects ordinary savers from distorted '
            'pricing" and urged criminal penalties.',
            "Brokerage analysts were more cautious, noting that liquidity could thin. One "
            'strategist said hedging costs "will rise for everyone".',
            "Officials countered that market-maker exemptions remain, and that \"monitoring "
            'systems will be ready" before any resumption.',
            "The regulator plans to present its electronic monitoring platform in March, and "
            'lawmakers said the extension "reflects public distrust" of enforcement.',
        ],
        article="supportive",
        headline_stance="supportive",
        lead="supportive",
        conclusion="neutral",
        quote_stances=["supportive", "supportive", "oppositional", "neutral", "neutral"],
    ),
    dict(
        id="ko-001",
        outlet="한겨레",
        published_date="2024-01-09",
        issue_id="dog-meat-ban-2024",
        issue_text="'개 식용 금지법' 국회 본회의 통과",
        genre="analysis",
        headline='\'개 식용\' 역사 끝날까…동물권단체 "실질적 종식 기대"',
        paragraphs=[
            "동물권단체들이 '개 식용 금지법'의 국회 통과를 일제히 환영했다. 단체들은 "
            "“실질적 종식 기대”라며 “개 식용 없는 나라로 가는 첫걸음”"
            "이라고 밝혔다.",
            '반면 육견협회는 "1000만 국민의 먹을 권리를 빼앗았다"며 강하게 반발했다.',
            "협회는 지난해 11월 서울 도심에서 대규모 항의 집회를 예고한 바 있다.",
        ],
        article="supportive",
        headline_stance="supportive",
        lead="supportive",
        conclusion="neutral",
        quote_stances=["supportive", "supportive", "oppositional"],
    ),
    dict(
        id="ko-002",
        outlet="조선일보",
        published_date="2024-01-10",
        issue_id="dog-meat-ban-2024",
        issue_text="'개 식용 금지법' 국회 본회의 통과",
        genre="analysis",
        headline='개 식용 금지법 통과…"20년 보신탕 팔았는데 살길 막막"',
        paragraphs=[
            "개 식용 금지법이 국회 본회의를 통과하면서 관련 업계의 반발이 거세지고 있다. 처벌 "
            "수위와 적정성을 둘러싼 논란도 다시 불거졌다.",
            '업주들은 "생계 대책 없이 법부터 통과시켰다"고 토로했다.',
            '한 상인은 "고기 구할 곳이 없어 문을 닫은 적도 있다"며 "임대료도 못 내는 형편"'
            "이라고 말했다.",
        ],
        article="oppositional",
        headline_stance="oppositional",
        lead="oppositional",
        conclusion="oppositional",
        quote_stances=["oppositional", "oppositional", "oppositional"],
    ),
    dict(
        id="ko-003",
        outlet="연합뉴스",
        published_date="2024-01-09",
        issue_id="dog-meat-ban-2024",
        issue_text="'개 식용 금지법' 국회 본회의 통과",
        genre="analysis",
        headline='개 식용 금지법 통과에 "기념비적 역사" vs "헌법소원 낼 것"',
        paragraphs=[
            "동물단체와 육견협회가 엇갈린 반응을 내놨다. 동물단체들은 “동물권의 승리"
            '”라며 환영했고, 협회는 "직업선택의 자유를 빼앗았다"며 헌법소원 방침을 '
            "밝혔다.",
            "이번 특별법은 식용 목적의 개 사육·도살·유통을 금지하는 내용을 골자로 한다.",
        ],
        article="neutral",
        headline_stance="neutral",
        lead="neutral",
        conclusion="neutral",
        quote_stances=["supportive", "oppositional"],
    ),
    dict(
        id="ko-004",
        outlet="한겨레",
        published_date="2022-06-16",
        issue_id="min-wage-2022",
        issue_text="내년 최저임금 업종 구분 없이 동일 적용",
        genre="opinion",
        headline="최저임금 단일 적용은 옳다",
        paragraphs=[
            "내년 최저임금을 업종 구분 없이 동일하게 적용하기로 한 결정은 저임금 노동자 보호라는 "
            "제도 취지에 부합한다. 노동계는 “차별 없는 임금 원칙”이 지켜졌다고 "
            "평가했다.",
            "제도의 실효성을 높이려면 근로감독 강화가 뒤따라야 한다.",
        ],
        article="supportive",
        headline_stance="supportive",
        lead="supportive",
        conclusion="neutral",
        quote_stances=["supportive"],
    ),
    dict(
        id="ko-005",
        outlet="조선일보",
        published_date="2022-06-17",
        issue_id="min-wage-2022",
        issue_text="내년 최저임금 업종 구분 없이 동일 적용",
        genre="opinion",
        headline="자영업자 벼랑 끝으로 내모는 최저임금 결정",
        paragraphs=[
            "업종별 지불 능력 차이를 무시한 이번 결정으로 영세 자영업자의 부담이 한층 커지게 됐다.",
            '소상공인연합회는 "한계 상황에 몰린 업종이 많다"며 "구분 적용이 필요했다"고 반발했다.',
            "편의점주들은 야간 영업 단축과 고용 축소를 검토하겠다고 밝혔다.",
        ],
        article="oppositional",
        headline_stance="oppositional",
        lead="oppositional",
        conclusion="neutral",
        quote_stances=["oppositional", "oppositional"],
    ),
    dict(
        id="ko-006",
        outlet="연합뉴스",
        published_date="2022-06-16",
        issue_id="min-wage-2022",
        issue_text="내년 최저임금 업종 구분 없이 동일 적용",
        genre="analysis",
        headline="최저임금 동일 적용 결정…노사 반응 엇갈려",
        paragraphs=[
            '내년 최저임금이 업종 구분 없이 동일 적용된다. 노동계는 "원칙을 지킨 결정"이라고 '
            '환영한 반면, 경영계는 "현장 부담이 크다"고 우려했다.',
            "최저임금위원회는 다음 달 최종 고시를 앞두고 있다.",
        ],
        article="neutral",
        headline_stance="neutral",
        lead="neutral",
        conclusion="neutral",
        quote_stances=["supportive", "oppositional"],
    ),
]


def build_record(a):
    body = "\n\n".join(a["paragraphs"])
    spans = extract_quotes(body)
    if len(spans) != len(a["quote_stances"]):
        raise SystemExit(
            f"{a['id']}: scanner found {len(spans)} quotes, {len(a['quote_stances'])} stances given\n"
            + "\n".join(repr(body[s:e]) for s, e in spans)
        )
    ann = {
        "article_stance": a["article"],
        "headline_stance": a["headline_stance"],
        "lead_stance": a["lead"],
    }
    if a["conclusion"] is not None:
        ann["conclusion_stance"] = a["conclusion"]
    ann["quotations"] = [
        {"char_start": s, "char_end": e, "stance": st}
        for (s, e), st in zip(spans, a["quote_stances"])
    ]
    return {
        "id": a["id"],
        "outlet": a["outlet"],
        "published_date": a["published_date"],
        "issue_id": a["issue_id"],
        "issue_text": a["issue_text"],
        "genre": a["genre"],
        "headline": a["headline"],
        "body_paragraphs": a["paragraphs"],
        "annotation": ann,
    }


def summarize(values):
    values = sorted(values)
    n = len(values)
    mean = sum(float(v) for v in values) / n
    median = float(values[n // 2]) if n % 2 else (values[n // 2 - 1] + values[n // 2]) / 2.0
    return dict(min=values[0], mean=mean, median=median, max=values[-1])


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    out_path = os.path.normpath(os.path.join(here, "..", "..", "fixtures", "fixture_corpus.jsonl"))
    os.makedirs(os.path.dirname(out_path), exist_ok=True)
    records = [build_record(a) for a in ARTICLES]
    with open(out_path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False, separators=(",", ":")) + "\n")

    char_lens = [len("\n\n".join(a["paragraphs"])) for a in ARTICLES]
    quote_counts = [len(a["quote_stances"]) for a in ARTICLES]
    print("n_articles:", len(ARTICLES))
    print("n_issues:", len({a["issue_id"] for a in ARTICLES}))
    labels = ["supportive", "neutral", "oppositional"]
    print("article label counts:", [sum(1 for a in ARTICLES if a["article"] == l) for l in labels])
    print("chars:", summarize(char_lens))
    print("char_lens:", char_lens)
    print("quotations:", summarize(quote_counts))
    print("quote_counts:", quote_counts)

    def dist(xs):
        total = len(xs)
        return [round(100.0 * sum(1 for x in xs if x == l) / total, 10) for l in labels]

    print("dist article:", dist([a["article"] for a in ARTICLES]))
    print("dist headline:", dist([a["headline_stance"] for a in ARTICLES]))
    print("dist lead:", dist([a["lead"] for a in ARTICLES]))
    print("dist conclusion:", dist([a["conclusion"] for a in ARTICLES if a["conclusion"]]))
    quote_labels = [st for a in ARTICLES for st in a["quote_stances"]]
    print("dist quotation:", dist(quote_labels), "n =", len(quote_labels))
    print("wrote", out_path)


if __name__ == "__main__":
    main()
