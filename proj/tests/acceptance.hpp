// Shared reporting for the acceptance binary: every criterion prints exactly
// one PASS/FAIL line with its measured values, then asserts.

#pragma once

#include <string>

void report_criterion(int id, bool pass, const std::string& detail);
