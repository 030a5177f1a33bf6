// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mvdenoise Authors

#ifndef MVDENOISE_MVDENOISE_HPP_
#define MVDENOISE_MVDENOISE_HPP_

#include "mvdenoise/common.hpp"
#include "mvdenoise/denoiser.hpp"
#include "mvdenoise/gofstat.hpp"
#include "mvdenoise/robustcov.hpp"
#include "mvdenoise/siggen.hpp"
#include "mvdenoise/wavelet.hpp"

#endif  // MVDENOISE_MVDENOISE_HPP_
