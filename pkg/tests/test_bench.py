import io
import math
import random

import pytest

from hesuite import BenchConfig, BenchRecord, SUBJECTS, bench_run, read_csv, write_csv
from hesuite.errors import ParameterError, SerializationError

# smallest sizes with enough safe primes to terminate instantly
SMALL = (20, 24)


def small_config(**kw):
    defaults = dict(n_bits_list=SMALL, iterations=2, keybits=16, databits=8,
                    randbits=16, seed=99)
    defaults.update(kw)
    return BenchConfig(**defaults)


class TestValidation:
    def test_rejects_bad_iterations(self):
        with pytest.raises(ParameterError):
            bench_run(small_config(iterations=0))

    def test_rejects_empty_or_unsorted_bits(self):
        with pytest.raises(ParameterError):
            bench_run(small_config(n_bits_list=()))
        with pytest.raises(ParameterError):
            bench_run(small_config(n_bits_list=(24, 20)))
        with pytest.raises(ParameterError):
            bench_run(small_config(n_bits_list=(20, 20)))

    def test_rejects_unknown_subject(self):
        with pytest.raises(ParameterError):
            bench_run(small_config(subjects=("enc", "divide")))


class TestRun:
    def test_full_grid(self):
        records = bench_run(small_config())
        grid = {(r.subject, r.n_bits) for r in records}
        assert grid == {(s, b) for s in SUBJECTS for b in SMALL}
        assert all(r.mean_micros >= 0 and r.stddev_micros >= 0 for r in records)
        assert all(r.iterations == 2 for r in records)
        # subjects come out in the declared order per modulus
        assert [r.subject for r in records[: len(SUBJECTS)]] == list(SUBJECTS)

    def test_single_iteration_has_zero_stddev(self):
        records = bench_run(small_config(iterations=1, n_bits_list=(20,),
                                         subjects=("enc",)))
        assert len(records) == 1
        assert records[0].stddev_micros == 0.0

    def test_grid_deterministic_across_runs(self):
        cfg = small_config(subjects=("keygen", "enc", "add.csp", "add.acs", "add.dr"))
        a = bench_run(cfg)
        b = bench_run(cfg)
        assert [(r.subject, r.n_bits, r.iterations) for r in a] == \
               [(r.subject, r.n_bits, r.iterations) for r in b]

    def test_explicit_rng_wins_over_seed(self):
        cfg = small_config(subjects=("keygen",), n_bits_list=(20,))
        records = bench_run(cfg, rng=random.Random(1))
        assert len(records) == 1

    def test_subset_without_setup_still_runs(self):
        records = bench_run(small_config(subjects=("mult.csp", "mult.acs", "mult.dr")))
        assert {r.subject for r in records} == {"mult.csp", "mult.acs", "mult.dr"}


class TestCsv:
    def test_roundtrip_six_significant_digits(self):
        records = [
            BenchRecord("enc", 512, 123456.789, 12.3456789, 500),
            BenchRecord("setup", 1024, 0.0, 0.0, 1),
        ]
        buf = io.StringIO()
        write_csv(records, buf)
        buf.seek(0)
        back = read_csv(buf)
        assert [(r.subject, r.n_bits, r.iterations) for r in back] == \
               [(r.subject, r.n_bits, r.iterations) for r in records]
        for orig, rt in zip(records, back):
            assert math.isclose(orig.mean_micros, rt.mean_micros, rel_tol=1e-5)
            assert math.isclose(orig.stddev_micros, rt.stddev_micros, rel_tol=1e-5,
                                abs_tol=1e-12)

    def test_header_layout(self):
        buf = io.StringIO()
        write_csv([], buf)
        assert buf.getvalue() == "subject,n_bits,mean_micros,stddev_micros,iterations\n"

    def test_read_rejects_bad_header(self):
        with pytest.raises(SerializationError):
            read_csv(io.StringIO("nope,n_bits\n"))
        with pytest.raises(SerializationError):
            read_csv(io.StringIO(""))

    def test_read_rejects_short_row(self):
        buf = io.StringIO("subject,n_bits,mean_micros,stddev_micros,iterations\nenc,512\n")
        with pytest.raises(SerializationError):
            read_csv(buf)
