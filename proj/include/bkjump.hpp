#pragma once

#include "bkjump/cli.hpp"
#include "bkjump/config.hpp"
#include "bkjump/errors.hpp"
#include "bkjump/experiments.hpp"
#include "bkjump/features.hpp"
#include "bkjump/io.hpp"
#include "bkjump/kernel_detector.hpp"
#include "bkjump/matrix.hpp"
#include "bkjump/metrics.hpp"
#include "bkjump/mlp.hpp"
#include "bkjump/rng.hpp"
#include "bkjump/signal_synth.hpp"
#include "bkjump/standardize.hpp"
#include "bkjump/stats.hpp"
#include "bkjump/svm.hpp"
