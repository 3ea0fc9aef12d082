#pragma once

// Cycle-accurate simulator for a bit-serial matrix-multiplication systolic
// array, with Booth-recoded and correction-based MAC variants, an analytic
// throughput model, and the functional verification protocol.

#include "bitsmm/bitmath.hpp"
#include "bitsmm/cli.hpp"
#include "bitsmm/errors.hpp"
#include "bitsmm/mac.hpp"
#include "bitsmm/mac_driver.hpp"
#include "bitsmm/matrix.hpp"
#include "bitsmm/p2s.hpp"
#include "bitsmm/perf_model.hpp"
#include "bitsmm/random.hpp"
#include "bitsmm/signed_word.hpp"
#include "bitsmm/systolic_array.hpp"
#include "bitsmm/trace.hpp"
#include "bitsmm/verify.hpp"
