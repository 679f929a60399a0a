"""
End-to-end tests: command pipelines through result files.
"""

import contextlib
import io
import json
import os
import tempfile
import unittest

from deltajet.cli import main
from deltajet.dseries import DeltaSeries, dump_series
from deltajet.manifest import read_result


class TestEndToEnd(unittest.TestCase):
    """Test complete runs that read and write files."""

    def setUp(self):
        """Set up test fixtures."""
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        """Clean up test fixtures."""
        self.tmp.cleanup()

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def write(self, name, data):
        with open(self.path(name), "w", encoding="utf-8") as fh:
            json.dump(data, fh)
        return self.path(name)

    def run_to_file(self, argv, name):
        out = self.path(name)
        with contextlib.redirect_stderr(io.StringIO()):
            code = main(argv + ["--out", out])
        self.assertEqual(code, 0)
        return read_result(out)

    def test_fsharp_from_eta_product(self):
        """Test f♯ of X_0(11) at p = 5 with the newform given as an eta product."""
        curve = self.write("x011.json", {"a4": -13392, "a6": -1080432, "level": 11,
                                         "eta": {"1": 2, "11": 2}, "label": "11a1"})
        data = self.run_to_file(["fsharp", "--p", "5", "--curve", curve, "--qdeg", "10",
                                 "--jetdeg", "5"], "fsharp.json")
        self.assertTrue(data["result"]["agree"])
        self.assertEqual(data["result"]["max_difference"], 0)
        self.assertIn("curve", data["manifest"]["inputs"])

    def test_hecke_then_u_operator(self):
        """Test q -> q^2 -> q at p = 2, passing the series through a result file."""
        series = self.path("q.json")
        dump_series(DeltaSeries.q(2, 0, 4, 2, 1), series)
        data = self.run_to_file(["hecke-p", "--series", series, "--m", "0"], "hecke.json")
        self.assertEqual(data["result"]["terms"], [[2, [], 1]])
        image = self.write("image.json", data["result"])
        result = self.run_to_file(["u-op", "--series", image], "u.json")["result"]
        self.assertEqual(result["terms"], [[1, [], 1]])

    def test_u_operator_refuses_jets(self):
        """Test that f¹ read back from a result file is not a q-series."""
        data = self.run_to_file(["f1", "--p", "3", "--N", "4", "--qdeg", "6", "--jetdeg", "4"], "f1.json")
        self.assertEqual(data["result"]["header"]["r"], 2)
        series = self.write("f1_series.json", data["result"])
        with contextlib.redirect_stderr(io.StringIO()):
            self.assertEqual(main(["u-op", "--series", series]), 4)

    def test_hecke_on_series_file(self):
        """Test q' -> q at p = 2 from a series file."""
        series = self.path("qprime.json")
        dump_series(DeltaSeries.q(2, 1, 4, 2, 1, order=1), series)
        result = self.run_to_file(["hecke-p", "--series", series, "--m", "1"], "qp_image.json")["result"]
        self.assertEqual(result["terms"], [[1, [0], 1]])

    def test_jet_of_point(self):
        """Test the second jet of a point of G_m."""
        scheme = self.write("gm.json", {"prime": 5, "vars": ["x", "y"], "relations": ["x*y - 1"]})
        result = self.run_to_file(["jet-point", "--p", "5", "--N", "8", "--order", "2",
                                   "--scheme", scheme, "--point", "2; 1/2"], "jet.json")["result"]
        self.assertEqual(len(result["jet"]), 6)
        self.assertEqual(result["vars"][2], "x'")

    def test_reproducible_manifest(self):
        """Test equal digests for equal runs and a changed digest for a changed input."""
        argv = ["witt", "present", "--p", "2", "--m", "2"]
        first = self.run_to_file(argv, "a.json")
        second = self.run_to_file(argv, "b.json")
        self.assertEqual(first["manifest"]["digest"], second["manifest"]["digest"])
        self.assertEqual(first["result"], second["result"])
        self.assertFalse(first["result"]["complete"])
        third = self.run_to_file(["witt", "present", "--p", "3", "--m", "2"], "c.json")
        self.assertNotEqual(first["manifest"]["digest"], third["manifest"]["digest"])

    def test_tampered_manifest(self):
        """Test that editing a recorded parameter breaks the digest."""
        self.run_to_file(["delta", "--p", "5", "--value", "2"], "delta.json")
        with open(self.path("delta.json"), "r", encoding="utf-8") as fh:
            data = json.load(fh)
        data["manifest"]["params"]["p"] = 7
        with open(self.path("delta.json"), "w", encoding="utf-8") as fh:
            json.dump(data, fh)
        with self.assertRaises(ValueError):
            read_result(self.path("delta.json"))


if __name__ == '__main__':
    unittest.main()
