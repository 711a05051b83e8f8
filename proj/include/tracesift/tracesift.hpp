#pragma once

#include "tracesift/config.hpp"
#include "tracesift/corpus.hpp"
#include "tracesift/errors.hpp"
#include "tracesift/features.hpp"
#include "tracesift/metrics.hpp"
#include "tracesift/ngram.hpp"
#include "tracesift/ocsvm.hpp"
#include "tracesift/parallel.hpp"
#include "tracesift/rng.hpp"
#include "tracesift/selection.hpp"
#include "tracesift/synthetic.hpp"
#include "tracesift/text.hpp"
#include "tracesift/trace.hpp"
