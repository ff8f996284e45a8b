#pragma once

// Umbrella include.

#include "twm/adhesive.hpp"
#include "twm/bench.hpp"
#include "twm/core.hpp"
#include "twm/deamort.hpp"
#include "twm/decompose.hpp"
#include "twm/dynmatrix.hpp"
#include "twm/gen.hpp"
#include "twm/io.hpp"
#include "twm/oracle.hpp"
#include "twm/pending.hpp"
#include "twm/pointloc.hpp"
#include "twm/rebuild.hpp"
#include "twm/veb.hpp"
#include "twm/work.hpp"
