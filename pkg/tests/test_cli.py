"""
Tests for the command-line front end.
"""

import contextlib
import io
import json
import os
import tempfile
import unittest

from deltajet.cli import main


def run(argv):
    """Run the CLI, returning (exit code, parsed stdout or None)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    text = out.getvalue()
    return code, (json.loads(text) if text.strip() else None)


class TestExitCodes(unittest.TestCase):
    """Test that each error family has its own exit code."""

    def test_ok(self):
        """Test δ(2) = -6 at p = 5."""
        code, data = run(["delta", "--p", "5", "--N", "6", "--value", "2"])
        self.assertEqual(code, 0)
        self.assertTrue(data["result"]["value"].startswith("-6 "))

    def test_precision(self):
        """Test exit code 2 for δ at precision 1."""
        code, data = run(["delta", "--p", "5", "--N", "1", "--value", "2"])
        self.assertEqual(code, 2)
        self.assertIsNone(data)

    def test_parse(self):
        """Test exit code 3 for a malformed number."""
        code, _ = run(["delta", "--p", "5", "--value", "x7"])
        self.assertEqual(code, 3)

    def test_domain(self):
        """Test exit code 4 for a composite modulus."""
        code, _ = run(["delta", "--p", "6", "--value", "2"])
        self.assertEqual(code, 4)

    def test_bad_config(self):
        """Test that unknown config keys are a parse error."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "config.json")
            with open(path, "w", encoding="utf-8") as fh:
                json.dump({"no_such_key": 1}, fh)
            code, _ = run(["delta", "--config", path, "--value", "2"])
        self.assertEqual(code, 3)

    def test_incomplete_curve_file(self):
        """Test exit code 3 for a curve without a6 and an eta product without level."""
        with tempfile.TemporaryDirectory() as tmp:
            curve = os.path.join(tmp, "curve.json")
            with open(curve, "w", encoding="utf-8") as fh:
                json.dump({"a4": -13392}, fh)
            code, _ = run(["ap", "--p", "7", "--curve", curve])
            self.assertEqual(code, 3)
            with open(curve, "w", encoding="utf-8") as fh:
                json.dump({"a4": -13392, "a6": -1080432, "eta": {"1": 2, "11": 2}}, fh)
            code, _ = run(["fsharp", "--p", "5", "--curve", curve, "--qdeg", "5"])
            self.assertEqual(code, 3)

    def test_cap(self):
        """Test exit code 5 when the Gröbner variable cap is hit."""
        with tempfile.TemporaryDirectory() as tmp:
            scheme = os.path.join(tmp, "gm.json")
            with open(scheme, "w", encoding="utf-8") as fh:
                json.dump({"prime": 3, "vars": ["x", "y"], "relations": ["x*y - 1"]}, fh)
            config = os.path.join(tmp, "config.json")
            with open(config, "w", encoding="utf-8") as fh:
                json.dump({"groebner_max_vars": 2}, fh)
            code, _ = run(["member", "--p", "3", "--config", config, "--scheme", scheme,
                           "--poly", "x'"])
        self.assertEqual(code, 5)


class TestCommands(unittest.TestCase):
    """Test individual subcommands."""

    def setUp(self):
        """Set up test fixtures."""
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        """Clean up test fixtures."""
        self.tmp.cleanup()

    def write(self, name, data):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(data, fh)
        return path

    def test_witt_mul(self):
        """Test [0, 1] * [0, 1] = [0, 2] at p = 2."""
        code, data = run(["witt", "mul", "--p", "2", "--u", "[0, 1]", "--v", "[0, 1]"])
        self.assertEqual(code, 0)
        self.assertEqual(data["result"]["value"], "[0, 2]")

    def test_witt_length_checked(self):
        """Test that --len must match the literal."""
        code, _ = run(["witt", "add", "--p", "2", "--len", "3", "--u", "[0, 1]", "--v", "[0, 1]"])
        self.assertEqual(code, 3)

    def test_jet_of_mu2(self):
        """Test the first jet space of μ_2."""
        scheme = self.write("mu2.json", {"prime": 2, "vars": ["x"], "relations": ["x^2 - 1"]})
        code, data = run(["jet", "--scheme", scheme, "--order", "1"])
        self.assertEqual(code, 0)
        self.assertEqual(len(data["result"]["relations"]), 2)
        self.assertEqual(data["result"]["vars"], ["x", "x'"])

    def test_solve_linear_zero_alpha(self):
        """Test that α = 0 gives the identity."""
        alpha = self.write("alpha.json", {"rows": [[0, 0], [0, 0]]})
        code, data = run(["solve-linear", "--p", "5", "--N", "6", "--alpha", alpha])
        self.assertEqual(code, 0)
        self.assertTrue(data["result"]["residual_zero"])
        self.assertEqual(data["result"]["rows"], [["1", "0"], ["0", "1"]])

    def test_ap(self):
        """Test a_7 of X_0(11) from its short model."""
        code, data = run(["ap", "--p", "7", "--a4", "-13392", "--a6", "-1080432"])
        self.assertEqual(code, 0)
        self.assertEqual(data["result"]["a_p"], -2)

    def test_flow_check(self):
        """Test the canonical flow on Sp_2."""
        code, data = run(["flow-check", "--p", "3", "--group", "Sp", "--samples", "2"])
        self.assertEqual(code, 0)
        self.assertEqual(data["result"]["horizontal_digits"], 1)

    def test_manifest_in_output(self):
        """Test that results carry their command and parameters."""
        code, data = run(["teich", "--p", "7", "--N", "5", "--value", "3"])
        self.assertEqual(code, 0)
        manifest = data["manifest"]
        self.assertEqual(manifest["command"], "teich")
        self.assertEqual(manifest["params"]["p"], 7)
        self.assertEqual(len(manifest["digest"]), 64)


if __name__ == '__main__':
    unittest.main()
