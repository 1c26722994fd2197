import math

from pyvarentropy.model import BoundReport, BoundSide, MeasureKind, PreconditionStatus


def test_upper_report_slack():
    report = BoundReport.upper("b", bound=2.0, exact=1.5, t=1.0, precondition=PreconditionStatus.HOLDS)
    assert report.side is BoundSide.UPPER
    assert report.slack == 0.5
    assert report.satisfied
    assert report.counts


def test_lower_report_slack():
    report = BoundReport.lower("b", bound=2.0, exact=1.5, t=1.0, precondition=PreconditionStatus.HOLDS)
    assert report.slack == -0.5
    assert not report.satisfied


def test_tolerance_on_slack():
    report = BoundReport.upper("b", bound=1.0 - 1e-9, exact=1.0, t=1.0, precondition=PreconditionStatus.HOLDS)
    assert report.satisfied


def test_nan_bound_is_never_satisfied():
    report = BoundReport.lower("b", bound=math.nan, exact=1.0, t=1.0, precondition=PreconditionStatus.VIOLATED)
    assert not report.satisfied
    assert not report.counts


def test_details_are_copied():
    details = {"eta": 1.0}
    report = BoundReport.upper("b", bound=1.0, exact=0.0, t=1.0, precondition=PreconditionStatus.HOLDS,
                               details=details)
    details["eta"] = 2.0
    assert report.details == {"eta": 1.0}


def test_variance_kinds():
    assert MeasureKind.WPVE.is_variance
    assert MeasureKind.VPL.is_variance
    assert not MeasureKind.WPSE.is_variance
    assert not MeasureKind.CRHR.is_variance
