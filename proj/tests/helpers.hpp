#pragma once

#include <catch_amalgamated.hpp>

#include "zetalab/core/precision.hpp"

// Asserts that `expr` throws zetalab::error with the given code.
#define CHECK_ERRC(expr, code_)                                                       \
    CHECK_THROWS_MATCHES(expr, zetalab::error,                                        \
                         Catch::Matchers::Predicate<zetalab::error>(                  \
                             [](const zetalab::error& e) { return e.code() == code_; }, \
                             std::string("error code ") + zetalab::to_string(code_)))
