import pytest

import zoea

WEEK_DAY = """\
program: is_week_day
# determines if input is a weekday
data: [ monday,tuesday,wednesday,
        thursday,friday,saturday,
        sunday ]
case: 1 input: thursday
      output: weekday
case: 2 input: 'MONDAY'
      output: weekday
case: 3 input: banana
      output: unrecognised
case: 4 input: ''
      output: unrecognised
"""


def test_catalog():
    names = zoea.catalog()
    assert "add" in names and "member" in names
    assert zoea.catalog_version.startswith("zoea-catalog/")


def test_synthesize_increment():
    assert zoea.synthesize([([1], 2), ([5], 6)]) in (
        "(add (const 1) (in 0))",
        "(add (in 0) (const 1))",
    )


def test_synthesize_gives_up_under_budget():
    assert zoea.synthesize([([1], 17), ([2], 40), ([3], 71)], max_cost=2) is None


def test_eval():
    assert zoea.eval_expr("(add (in 0) (const 1))", [41]) == 42
    assert zoea.eval_expr("(uppercase (in 0))", ["ab"]) == "AB"


def test_compile_and_run_week_day():
    report = zoea.compile_text(WEEK_DAY)
    assert report["success"]
    assert report["failed"] == []
    assert report["events"][-2]["state"] == "solved"
    assert report["events"][-1] == {"result": "success", "failed": []}
    pipeline = report["pipeline"]
    assert zoea.run_pipeline(pipeline, ["Tuesday"]) == ["weekday"]
    assert zoea.run_pipeline(pipeline, ["banana"]) == ["unrecognised"]
    with pytest.raises(zoea.RunError):
        zoea.run_pipeline(pipeline, [3])


def test_import_export_round_trip():
    doc = zoea.import_zoea(WEEK_DAY)
    assert len(doc["cases"]) == 4
    wrapped = zoea.import_zoea(WEEK_DAY, mode="list")
    # Export writes columns as lists; the list-mode import reads them back as drawn.
    text = zoea.export_document(wrapped)
    assert zoea.export_document(zoea.import_zoea(text, mode="list")) == text
    assert text.splitlines()[1] == "# determines if input is a weekday"
    assert zoea.format_zoea(zoea.format_zoea(WEEK_DAY)) == zoea.format_zoea(WEEK_DAY)


def test_errors():
    with pytest.raises(zoea.ParseError, match="line 2"):
        zoea.format_zoea("program: p\n  inpt: 3\n")
    dup = "program: p case: 1 input: 1 output: 1 case: 1 input: 2 output: 2"
    assert any(sev == "error" for sev, _, _ in zoea.validate_zoea(dup))
    with pytest.raises(ValueError):
        zoea.synthesize([([1], 2)], max_cost=0)
