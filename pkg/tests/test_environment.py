import pytest

from topicsim.environment import (
    ActionDurations,
    ActionKind,
    AgentAction,
    NavigationError,
    PageState,
    Session,
    TrendingTopic,
    apply_action,
    page_window,
    rank_comments,
    render,
)
from topicsim.lifecycle import LifecycleParams


def make_topic(**kw):
    fields = dict(
        id="t1",
        title="Bridge Closed After Cracks Found",
        summary="The main commuter bridge is closed indefinitely.",
        full_content="Inspectors found structural cracks in two piers during a routine check.",
        sentiment="negative",
        params=LifecycleParams(),
    )
    fields.update(kw)
    return TrendingTopic(**fields)


def make_session(page=None, clock=0.0, max_actions=6):
    return Session(actor_id="u1", start_time=clock, clock=clock,
                   page=page or PageState.browsing(), max_actions=max_actions)


def test_topic_validation():
    with pytest.raises(ValueError):
        make_topic(title="")
    with pytest.raises(ValueError):
        make_topic(sentiment="mixed")


def test_browsing_render_hides_full_content():
    topic = make_topic()
    text = render(topic, PageState.browsing(), now=0.0)
    assert topic.title in text
    assert topic.summary in text
    assert topic.full_content not in text


def test_comment_invisible_until_created_at():
    topic = make_topic()
    topic.add_comment("alice", "written during her session", created_at=194.0)
    early = render(topic, PageState.main(), now=193.0)
    late = render(topic, PageState.main(), now=194.0)
    assert "written during her session" not in early
    assert "written during her session" in late


def test_pagination_arithmetic():
    topic = make_topic()
    for i in range(7):
        topic.add_comment(f"u{i}", f"comment number {i}", created_at=float(i))
    window = page_window(topic, PageState.main(offset=5), now=100.0, k=5)
    assert len(window) == 2
    text = render(topic, PageState.main(offset=5), now=100.0, k=5)
    assert "Comments 6-7 of 7" in text


def test_rank_comments_orders_by_likes_then_age_then_id():
    topic = make_topic()
    c1 = topic.add_comment("u1", "three likes", created_at=1.0)
    c2 = topic.add_comment("u2", "five likes old", created_at=2.0)
    c3 = topic.add_comment("u3", "five likes new", created_at=3.0)
    c1.like_count, c2.like_count, c3.like_count = 3, 5, 5
    assert [c.id for c in rank_comments(topic.comments, now=10.0)] == [c2.id, c3.id, c1.id]


def test_rank_all_zero_likes_is_chronological():
    topic = make_topic()
    ids = [topic.add_comment(f"u{i}", f"c{i}", created_at=float(10 - i)).id for i in range(3)]
    ranked = [c.id for c in rank_comments(topic.comments, now=20.0)]
    assert ranked == list(reversed(ids))


def test_flagged_comment_excluded_even_with_max_likes():
    topic = make_topic()
    bad = topic.add_comment("evil", "hidden text", created_at=0.5)
    bad.like_count = 99
    bad.flagged = True
    good = topic.add_comment("u1", "fine text", created_at=1.0)
    assert [c.id for c in rank_comments(topic.comments, now=5.0)] == [good.id]
    assert "hidden text" not in render(topic, PageState.main(), now=5.0)


def test_comment_detail_render_and_errors():
    topic = make_topic()
    comment = topic.add_comment("u1", "parent comment", created_at=1.0)
    topic.add_reply(comment, "u2", "first reply", created_at=2.0)
    popular = topic.add_reply(comment, "u3", "popular reply", created_at=3.0)
    popular.like_count = 4
    text = render(topic, PageState.comment(comment.id), now=10.0)
    assert "parent comment" in text
    assert text.index("popular reply") < text.index("first reply")
    with pytest.raises(NavigationError):
        render(topic, PageState.comment("c99999"), now=10.0)
    comment.flagged = True
    with pytest.raises(NavigationError):
        render(topic, PageState.comment(comment.id), now=10.0)


def test_reply_cannot_predate_parent():
    topic = make_topic()
    comment = topic.add_comment("u1", "parent", created_at=5.0)
    with pytest.raises(ValueError):
        topic.add_reply(comment, "u2", "too early", created_at=4.0)


def test_view_details_transition():
    topic = make_topic()
    session = make_session()
    outcome = apply_action(session, AgentAction(kind=ActionKind.VIEW_DETAILS), topic)
    assert session.page == PageState.main(0)
    assert not outcome.terminal
    assert session.clock == pytest.approx(0.5)


def test_comment_lands_two_minutes_later():
    topic = make_topic()
    session = make_session(page=PageState.main(0), clock=192.0)
    outcome = apply_action(session, AgentAction(kind=ActionKind.COMMENT, text="hi"), topic)
    assert outcome.mutation["created_at"] == pytest.approx(194.0)
    assert topic.comments[0].created_at == pytest.approx(194.0)
    assert session.clock == pytest.approx(194.0)


def test_session_caps_at_max_actions():
    topic = make_topic()
    session = make_session(page=PageState.main(0), max_actions=3)
    for i in range(3):
        outcome = apply_action(session, AgentAction(kind=ActionKind.LIKE), topic)
    assert outcome.terminal
    assert session.actions_taken == 3
    assert topic.like_count == 3


def test_view_more_advances_offset_and_back_restores_it():
    topic = make_topic()
    comment = topic.add_comment("u1", "target", created_at=0.0)
    session = make_session(page=PageState.main(0))
    apply_action(session, AgentAction(kind=ActionKind.VIEW_MORE), topic, k=5)
    assert session.page == PageState.main(5)
    session.window = [comment.id]
    apply_action(session, AgentAction(kind=ActionKind.VIEW_COMMENT, index=0), topic)
    assert session.page == PageState.comment(comment.id)
    apply_action(session, AgentAction(kind=ActionKind.BACK), topic)
    assert session.page == PageState.main(5)


def test_like_on_comment_page_targets_the_comment():
    topic = make_topic()
    comment = topic.add_comment("u1", "likeable", created_at=0.0)
    session = make_session(page=PageState.comment(comment.id))
    apply_action(session, AgentAction(kind=ActionKind.LIKE), topic)
    assert comment.like_count == 1
    assert topic.like_count == 0


def test_reply_goes_to_viewed_comment():
    topic = make_topic()
    comment = topic.add_comment("u1", "parent", created_at=0.0)
    session = make_session(page=PageState.comment(comment.id), clock=10.0)
    outcome = apply_action(
        session, AgentAction(kind=ActionKind.REPLY, text="answering you"), topic
    )
    assert comment.replies[0].text == "answering you"
    assert comment.replies[0].created_at == pytest.approx(12.0)
    assert outcome.mutation["op"] == "reply"


def test_repost_increments_counter_only():
    topic = make_topic()
    session = make_session(page=PageState.main(0))
    apply_action(session, AgentAction(kind=ActionKind.REPOST), topic)
    assert topic.repost_count == 1


def test_illegal_action_substitutes_and_reports():
    topic = make_topic()
    session = make_session(page=PageState.browsing())
    outcome = apply_action(session, AgentAction(kind=ActionKind.LIKE), topic)
    assert outcome.violation is not None
    assert outcome.applied == ActionKind.LEAVE
    assert outcome.terminal

    comment = topic.add_comment("u1", "c", created_at=0.0)
    session = make_session(page=PageState.comment(comment.id))
    outcome = apply_action(session, AgentAction(kind=ActionKind.REPOST), topic)
    assert outcome.applied == ActionKind.BACK
    assert session.page.kind.value == "main"


def test_censor_hook_runs_on_comment_path():
    flagged_ids = []

    def fake_censor(comment):
        comment.flagged = True
        flagged_ids.append(comment.id)

        class V:
            malice = 0.9

        return V()

    topic = make_topic()
    session = make_session(page=PageState.main(0))
    outcome = apply_action(
        session,
        AgentAction(kind=ActionKind.COMMENT, text="nasty"),
        topic,
        censor_fn=fake_censor,
        is_poison=True,
    )
    assert flagged_ids == [topic.comments[0].id]
    assert outcome.mutation["flagged"] is True
    assert outcome.mutation["is_poison"] is True
    assert outcome.mutation["malice"] == 0.9


def test_action_text_invariant():
    with pytest.raises(ValueError):
        AgentAction(kind=ActionKind.COMMENT)
    with pytest.raises(ValueError):
        AgentAction(kind=ActionKind.LIKE, text="nope")


def test_durations_defaults():
    durations = ActionDurations()
    assert durations.of(ActionKind.COMMENT) == 2.0
    assert durations.of(ActionKind.LEAVE) == 0.0
