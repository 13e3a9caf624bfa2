#pragma once

#include <doctest.h>

#include "bklab/error.hpp"

// Runs fn and returns the code of the bklab::Error it throws.
template <typename Fn>
bklab::ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const bklab::Error& e) {
    return e.code();
  }
  FAIL("expected bklab::Error");
  return bklab::ErrorCode::InvalidArgument;
}
