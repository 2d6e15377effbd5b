//! Holds the `acceptance` test target, which runs the numbered acceptance
//! criteria end to end and prints one PASS/FAIL line for each.
