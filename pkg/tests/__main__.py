"""Run all tests in this folder, each in its own interpreter"""

import time
import os
import sys
import glob
import subprocess as sp

tests_py = sorted(glob.glob(os.path.join(os.path.dirname(__file__), "*_tests.py")))
failed = []
t0 = time.time()
for t in tests_py:
    if sp.Popen([sys.executable, t]).wait() != 0:
        failed.append(t)

print("All tests completed")
print("Time spent: {0: .3f} s".format(time.time() - t0))
if failed:
    sys.stdout.write("The following tests failed:\n\t")
    print("\n\t".join(failed))

    sys.exit(1)
