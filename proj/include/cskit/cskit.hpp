#pragma once

// Umbrella header.

#include "cskit/campaign.hpp"
#include "cskit/certify.hpp"
#include "cskit/combinatorics.hpp"
#include "cskit/config.hpp"
#include "cskit/errors.hpp"
#include "cskit/io.hpp"
#include "cskit/metrics.hpp"
#include "cskit/model.hpp"
#include "cskit/parallel.hpp"
#include "cskit/phase.hpp"
#include "cskit/random.hpp"
#include "cskit/recovery.hpp"
#include "cskit/timing.hpp"
#include "cskit/version.hpp"
