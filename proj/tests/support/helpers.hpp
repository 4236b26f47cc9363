#pragma once

#include <gtest/gtest.h>

#include <functional>
#include <optional>

#include "stixelforge/error.hpp"

namespace sf_test {

/// Code of the stixelforge::Error thrown by `f`, empty when nothing (or something else) is thrown.
inline std::optional<stixelforge::Errc> error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const stixelforge::Error& e) {
    return e.code();
  } catch (...) {
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace sf_test

#define EXPECT_ERRC(stmt, errc) EXPECT_EQ(sf_test::error_code([&] { stmt; }), stixelforge::errc)
