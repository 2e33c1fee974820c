#pragma once

#include "dpotts/bounds.hpp"
#include "dpotts/campaign.hpp"
#include "dpotts/config.hpp"
#include "dpotts/disorder.hpp"
#include "dpotts/exact.hpp"
#include "dpotts/fss.hpp"
#include "dpotts/lattice.hpp"
#include "dpotts/observables.hpp"
#include "dpotts/potts.hpp"
#include "dpotts/records.hpp"
#include "dpotts/rng.hpp"
#include "dpotts/tempering.hpp"
