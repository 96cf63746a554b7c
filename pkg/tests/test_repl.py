import io

from dynsem.lang.repl import Repl, repl_loop


def session(text):
    out = io.StringIO()
    repl = repl_loop(io.StringIO(text), out, prompt=False)
    return repl, out.getvalue().splitlines()


def test_knocking_trace():
    _, lines = session(":load knocking\n(assert K)\n(might J)\n(assert M)\n(might J)\n")
    assert lines[1] == "  {w0, wJ, wM}"
    states = [line for line in lines if line.startswith(("{", "∅"))]
    assert states == ["{wJ, wM}", "{wJ, wM}", "{wM}", "∅ (absurd)"]
    assert "  accepts: K, M" in lines
    assert lines[-1] == "  accepts every proposition"


def test_undo_and_reset():
    repl, lines = session(":load knocking\n(assert M)\n:undo\n(assert J)\n:reset\n")
    assert lines[-1] == "{w0, wJ, wM}"
    assert lines[-3] == "{wJ}"
    assert repl.history["knock"][-2] == frozenset({"wJ"})


def test_undo_at_start():
    _, lines = session(":load knocking\n:undo\n")
    assert "nothing to undo" in lines


def test_orders_side_by_side():
    _, lines = session(":load knocking\n(assert K)\n:orders (might J) (assert M)\n")
    assert lines[-3].endswith("{wM}")
    assert lines[-2].endswith("∅ (absurd)")
    assert lines[-1] == "orders diverge"


def test_errors_do_not_end_session():
    _, lines = session(":load knocking\n(assert Z)\n(assert\n K)\n:bogus\n(assert K\n")
    assert any("unknown atom 'Z'" in line for line in lines)
    assert "{wJ, wM}" in lines
    assert any("unknown command :bogus" in line for line in lines)
    assert lines[-3].startswith("error: 1:10: unbalanced") and lines[-1].endswith("^")


def test_no_model_loaded():
    _, lines = session("(assert K)\n:state\n")
    assert lines == ["error: no model loaded (try :load knocking)"] * 2


def test_declarations_at_the_prompt():
    text = """(model m (worlds a b) (atom p a))
(assert p)
(discourse d m (might p))
(run d)
:models
"""
    _, lines = session(text)
    assert "{a}" in lines
    assert any(line.startswith("run d: verdict=coherent") for line in lines)
    assert "  * m (model)" in lines


def test_anaphora_session():
    text = ":load anaphora\n(seq (name y George) (test came_in y))\n(pronoun he male)\n"
    _, lines = session(text)
    assert "  bound he ↦ George" in lines


def test_quantum_session():
    _, lines = session(":load order-effect\n(ask A)\n(ask B)\n:use phi\n:use nowhere\n")
    assert "  p(yes) = 0.5" in lines
    assert any(line.startswith("current model: phi") for line in lines)
    assert lines[-1].startswith("error:")


def test_quit_stops_reading():
    repl, lines = session(":load knocking\n:quit\n(assert K)\n")
    assert repl.state() == frozenset({"w0", "wJ", "wM"})


def test_help():
    out = io.StringIO()
    Repl(out).feed(":help")
    assert ":orders" in out.getvalue()
