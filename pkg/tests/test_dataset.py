import numpy as np
import pytest

from demandforge.dataset import (
    CleaningPolicy,
    Frequency,
    LoaderSpec,
    Panel,
    SeriesKey,
    join_exogenous,
    load_panel,
    load_panel_detailed,
    read_canonical_csv,
    split_holdout,
    write_canonical_csv,
)
from demandforge.errors import (
    DuplicateKey,
    FrequencyViolation,
    GapError,
    MissingColumn,
    NegativeTarget,
    ParseError,
    SchemaCollision,
    SeriesTooShort,
)


def csv_file(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def monthly_spec(path, **kw):
    defaults = dict(
        path=path,
        key_columns=("site",),
        timestamp_column="month",
        target_column="demand",
        frequency=Frequency.MONTHLY,
        timestamp_format="%Y-%m",
    )
    defaults.update(kw)
    return LoaderSpec(**defaults)


def make_panel(series, frequency=Frequency.MONTHLY, schema=(), cleaning=CleaningPolicy()):
    data = {}
    for name, values in series.items():
        targets = np.asarray(values, dtype=np.float64)
        exo = np.zeros((len(targets), len(schema)))
        data[SeriesKey((name,))] = (targets, exo)
    return Panel(frequency, data, schema, cleaning)


class TestLoadPanel:
    def test_complete_monthly_csv(self, tmp_path):
        path = csv_file(tmp_path, "site,month,demand\na,2020-01,5\na,2020-02,7\na,2020-03,9\n")
        panel = load_panel(monthly_spec(path))
        key = SeriesKey(("a",))
        assert panel.keys() == (key,)
        assert panel.length(key) == 3
        assert [o.timestep for o in panel.observations(key)] == [0, 1, 2]
        assert panel.targets(key).tolist() == [5.0, 7.0, 9.0]

    def test_gap_filled_with_zero(self, tmp_path):
        path = csv_file(tmp_path, "site,month,demand\na,2020-01,5\na,2020-03,9\n")
        panel = load_panel(monthly_spec(path))
        assert panel.targets(SeriesKey(("a",))).tolist() == [5.0, 0.0, 9.0]

    def test_gap_forward_fill(self, tmp_path):
        path = csv_file(tmp_path, "site,month,demand\na,2020-01,5\na,2020-03,9\n")
        spec = monthly_spec(path, cleaning=CleaningPolicy(gap_fill="forward"))
        assert load_panel(spec).targets(SeriesKey(("a",))).tolist() == [5.0, 5.0, 9.0]

    def test_gap_reject(self, tmp_path):
        path = csv_file(tmp_path, "site,month,demand\na,2020-01,5\na,2020-03,9\n")
        with pytest.raises(GapError):
            load_panel(monthly_spec(path, cleaning=CleaningPolicy(gap_fill="reject")))

    def test_unparsable_target_reports_line(self, tmp_path):
        path = csv_file(
            tmp_path,
            "site,month,demand\na,2020-01,1\na,2020-02,2\na,2020-03,3\na,2020-04,abc\n",
        )
        with pytest.raises(ParseError) as err:
            load_panel(monthly_spec(path))
        assert err.value.line == 5
        assert "line 5" in str(err.value)

    def test_missing_column(self, tmp_path):
        path = csv_file(tmp_path, "site,month,qty\na,2020-01,1\n")
        with pytest.raises(MissingColumn):
            load_panel(monthly_spec(path))

    def test_two_rows_same_period(self, tmp_path):
        path = csv_file(tmp_path, "site,month,demand\na,2020-01,1\na,2020-01,2\n")
        with pytest.raises(FrequencyViolation):
            load_panel(monthly_spec(path))

    def test_negative_target_policies(self, tmp_path):
        path = csv_file(tmp_path, "site,month,demand\na,2020-01,-4\na,2020-02,2\n")
        panel, report = load_panel_detailed(monthly_spec(path))
        assert panel.targets(SeriesKey(("a",))).tolist() == [0.0, 2.0]
        assert report.negatives_clamped == 1
        with pytest.raises(NegativeTarget):
            load_panel(monthly_spec(path, cleaning=CleaningPolicy(negative_target="reject")))

    def test_missing_target_forward_fill(self, tmp_path):
        path = csv_file(tmp_path, "site,month,demand\na,2020-01,5\na,2020-02,\na,2020-03,9\n")
        panel = load_panel(monthly_spec(path))
        assert panel.targets(SeriesKey(("a",))).tolist() == [5.0, 5.0, 9.0]

    def test_missing_target_drop_row_creates_gap(self, tmp_path):
        path = csv_file(tmp_path, "site,month,demand\na,2020-01,5\na,2020-02,\na,2020-03,9\n")
        spec = monthly_spec(path, cleaning=CleaningPolicy(missing="drop_row", gap_fill="zero"))
        assert load_panel(spec).targets(SeriesKey(("a",))).tolist() == [5.0, 0.0, 9.0]

    def test_row_order_does_not_matter(self, tmp_path):
        rows = ["a,2020-02,7", "b,2020-01,1", "a,2020-01,5", "a,2020-03,9", "b,2020-02,2"]
        p1 = load_panel(monthly_spec(csv_file(tmp_path, "site,month,demand\n" + "\n".join(rows) + "\n", "f1.csv")))
        p2 = load_panel(monthly_spec(csv_file(tmp_path, "site,month,demand\n" + "\n".join(reversed(rows)) + "\n", "f2.csv")))
        assert p1 == p2

    def test_idempotent_on_clean_data(self, tmp_path):
        path = csv_file(
            tmp_path,
            "site,month,demand\na,2020-01,1.5\na,2020-02,0\na,2020-03,2.25\n",
        )
        panel, report = load_panel_detailed(monthly_spec(path))
        assert panel.targets(SeriesKey(("a",))).tolist() == [1.5, 0.0, 2.25]
        assert report.missing_filled == report.gaps_filled == report.negatives_clamped == 0

    def test_weekly_and_integer_timesteps(self, tmp_path):
        path = csv_file(
            tmp_path,
            "site,week,demand\na,2021-01-04,3\na,2021-01-11,4\na,2021-01-18,5\n",
        )
        spec = LoaderSpec(
            path=path, key_columns=("site",), timestamp_column="week",
            target_column="demand", frequency=Frequency.WEEKLY,
        )
        panel = load_panel(spec)
        assert panel.length(SeriesKey(("a",))) == 3

    def test_composite_key_and_exogenous(self, tmp_path):
        path = csv_file(
            tmp_path,
            "site,product,month,demand,pop\nx,p1,2020-01,1,70\nx,p1,2020-02,2,71\n",
        )
        spec = LoaderSpec(
            path=path, key_columns=("site", "product"), timestamp_column="month",
            target_column="demand", frequency=Frequency.MONTHLY,
            exogenous_columns=("pop",), timestamp_format="%Y-%m",
        )
        panel = load_panel(spec)
        key = SeriesKey(("x", "p1"))
        assert panel.exogenous_schema == ("pop",)
        assert panel.exogenous_values(key)[:, 0].tolist() == [70.0, 71.0]


class TestSplitHoldout:
    def test_basic_split_lengths(self):
        panel = make_panel({"a": np.arange(42) + 1.0})
        train, test = split_holdout(panel, 3)
        key = SeriesKey(("a",))
        assert train.length(key) == 39
        assert test.length(key) == 3
        assert np.concatenate([train.targets(key), test.targets(key)]).tolist() == (
            panel.targets(key).tolist()
        )

    def test_zero_horizon_rejected(self):
        panel = make_panel({"a": [1.0, 2.0]})
        with pytest.raises(ValueError):
            split_holdout(panel, 0)

    def test_too_short_series_named(self):
        panel = make_panel({"long": np.ones(10), "tiny": np.ones(3)})
        with pytest.raises(SeriesTooShort) as err:
            split_holdout(panel, 3)
        assert err.value.keys == (SeriesKey(("tiny",)),)

    def test_partition_property(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(4, 30))
            h = int(rng.integers(1, n))
            panel = make_panel({"s": rng.integers(0, 9, n).astype(float)})
            train, test = split_holdout(panel, h)
            key = SeriesKey(("s",))
            rebuilt = np.concatenate([train.targets(key), test.targets(key)])
            assert np.array_equal(rebuilt, panel.targets(key))


class TestJoinExogenous:
    def test_timestep_keyed_join(self):
        panel = make_panel({"a": [1.0, 2.0, 3.0]})
        table = {0: {"pop": 70.0}, 1: {"pop": 70.0}, 2: {"pop": 71.0}}
        joined = join_exogenous(panel, table, on="timestep")
        assert joined.exogenous_schema == ("pop",)
        assert joined.exogenous_values(SeriesKey(("a",)))[:, 0].tolist() == [70.0, 70.0, 71.0]
        assert panel.exogenous_schema == ()  # original untouched

    def test_key_part_join(self):
        panel = make_panel({"north": [1.0, 2.0], "south": [3.0, 4.0]})
        table = {"north": {"capacity": 10.0}, "south": {"capacity": 20.0}}
        joined = join_exogenous(panel, table, on=0)
        assert joined.exogenous_values(SeriesKey(("south",)))[:, 0].tolist() == [20.0, 20.0]

    def test_empty_table_zero_fill(self):
        panel = make_panel({"a": [1.0, 2.0]}, cleaning=CleaningPolicy(missing="zero_fill"))
        joined = join_exogenous(panel, {}, on="timestep", columns=["pop"])
        assert joined.exogenous_values(SeriesKey(("a",)))[:, 0].tolist() == [0.0, 0.0]

    def test_schema_collision(self):
        panel = make_panel({"a": [1.0, 2.0]}, schema=("pop",))
        with pytest.raises(SchemaCollision):
            join_exogenous(panel, {0: {"pop": 1.0}}, on="timestep")

    def test_duplicate_key_in_pair_table(self):
        panel = make_panel({"a": [1.0, 2.0]})
        with pytest.raises(DuplicateKey):
            join_exogenous(panel, [(0, {"x": 1.0}), (0, {"x": 2.0})], on="timestep")

    def test_unmatched_forward_fill(self):
        panel = make_panel({"a": [1.0, 2.0, 3.0]})  # default missing=forward_fill
        joined = join_exogenous(panel, {0: {"x": 5.0}, 2: {"x": 7.0}}, on="timestep")
        assert joined.exogenous_values(SeriesKey(("a",)))[:, 0].tolist() == [5.0, 5.0, 7.0]


class TestCanonicalCsv:
    def test_round_trip_identity(self, tmp_path):
        rng = np.random.default_rng(17)
        data = {
            SeriesKey(("s1", "p1")): (
                rng.uniform(0, 9, 5),
                rng.uniform(0, 2, (5, 2)),
            ),
            SeriesKey(("s2", "p9")): (
                rng.integers(0, 4, 8).astype(float),
                rng.uniform(0, 2, (8, 2)),
            ),
        }
        panel = Panel(Frequency.WEEKLY, data, ("zeta", "alpha"))
        path = tmp_path / "panel.csv"
        write_canonical_csv(panel, path)
        reloaded = read_canonical_csv(path, Frequency.WEEKLY)
        assert reloaded == panel
        # schema got alphabetized at construction already
        assert panel.exogenous_schema == ("alpha", "zeta")

    def test_round_trip_twice_is_stable(self, tmp_path):
        panel = make_panel({"a": [1.0, 0.0, 2.5]})
        p1 = tmp_path / "one.csv"
        p2 = tmp_path / "two.csv"
        write_canonical_csv(panel, p1)
        again = read_canonical_csv(p1, Frequency.MONTHLY)
        write_canonical_csv(again, p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestPanelInvariants:
    def test_series_sorted_and_immutable(self):
        panel = make_panel({"b": [1.0], "a": [2.0]})
        assert [k.parts[0] for k in panel.keys()] == ["a", "b"]
        with pytest.raises(ValueError):
            panel.targets(SeriesKey(("a",)))[0] = 9.0
        with pytest.raises(AttributeError):
            panel.frequency = Frequency.DAILY

    def test_uniform_interface(self):
        panel = make_panel({"a": [3.0, 4.0]})
        rows = [(str(k), o.timestep, o.target) for k, obs in panel.items() for o in obs]
        assert rows == [("a", 0, 3.0), ("a", 1, 4.0)]

    def test_frequency_days(self):
        assert Frequency.DAILY.days_per_period == 1
        assert Frequency.WEEKLY.days_per_period == 7
        assert Frequency.MONTHLY.days_per_period == 30
