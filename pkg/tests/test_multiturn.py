import pytest

from seatok import (
    Conversation,
    Document,
    MultiturnError,
    build_vocabulary,
    encode_conversation,
    join_multiturn,
    load_conversations,
    render_conversation,
    save_conversations,
)


def _sft(n):
    return [Document(kind="sft", prompt=f"q{i}", response=f"r{i}", lang="eng")
            for i in range(n)]


def test_identity_distribution_keeps_every_example():
    docs = _sft(6)
    convs = join_multiturn(docs, {1: 1.0}, seed=3)
    assert all(len(c.turns) == 1 for c in convs)
    assert sorted(t for c in convs for t, _ in c.turns) == sorted(d.prompt for d in docs)


def test_pairs_of_two():
    convs = join_multiturn(_sft(4), {2: 1.0}, seed=0)
    assert [len(c.turns) for c in convs] == [2, 2]


def test_leftover_forms_shorter_conversation():
    convs = join_multiturn(_sft(5), {2: 1.0}, seed=0)
    assert [len(c.turns) for c in convs] == [2, 2, 1]


def test_mixed_distribution_consumes_everything():
    docs = _sft(23)
    convs = join_multiturn(docs, {1: 0.25, 2: 0.25, 3: 0.25, 4: 0.25}, seed=11)
    assert sum(len(c.turns) for c in convs) == 23
    assert all(1 <= len(c.turns) <= 4 for c in convs)


def test_seeded_shuffle_reproducible():
    docs = _sft(10)
    a = join_multiturn(docs, {2: 1.0}, seed=4)
    b = join_multiturn(docs, {2: 1.0}, seed=4)
    c = join_multiturn(docs, {2: 1.0}, seed=5)
    assert [x.turns for x in a] == [x.turns for x in b]
    assert [x.turns for x in a] != [x.turns for x in c]


def test_distribution_validation():
    with pytest.raises(MultiturnError, match="sum"):
        join_multiturn(_sft(2), {1: 0.5, 2: 0.4}, seed=0)
    with pytest.raises(MultiturnError, match=">= 1"):
        join_multiturn(_sft(2), {0: 1.0}, seed=0)
    with pytest.raises(MultiturnError, match="negative"):
        join_multiturn(_sft(2), {1: 1.5, 2: -0.5}, seed=0)
    with pytest.raises(MultiturnError, match="empty"):
        join_multiturn(_sft(2), {}, seed=0)


def test_render_uses_turn_markers():
    conv = Conversation(turns=[("hi", "yo"), ("a", "b")])
    assert render_conversation(conv) == "<user>hi<assistant>yo<user>a<assistant>b"


def test_encode_masks_prompts_and_markers():
    v = build_vocabulary(list("qrab"), specials=["<user>", "<assistant>"])
    conv = Conversation(turns=[("q", "rr")])
    ids, mask = encode_conversation(
        v, conv, v.index["<user>"], v.index["<assistant>"]
    )
    assert ids == [v.index["<user>"], v.index["q"], v.index["<assistant>"],
                   v.index["r"], v.index["r"]]
    assert mask == [0, 0, 0, 1, 1]


def test_conversations_jsonl_round_trip(tmp_path):
    convs = join_multiturn(_sft(5), {2: 1.0}, seed=1)
    path = tmp_path / "convs.jsonl"
    save_conversations(convs, path)
    loaded = load_conversations(path)
    assert [c.turns for c in loaded] == [c.turns for c in convs]
    assert [c.lang for c in loaded] == [c.lang for c in convs]
