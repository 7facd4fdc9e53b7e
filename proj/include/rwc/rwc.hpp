#pragma once

#include "rwc/choice/evaluate.hpp"
#include "rwc/choice/features.hpp"
#include "rwc/choice/logit.hpp"
#include "rwc/choice/model.hpp"
#include "rwc/dissimilarity.hpp"
#include "rwc/district.hpp"
#include "rwc/district_io.hpp"
#include "rwc/feasibility.hpp"
#include "rwc/optimizer/brute_force.hpp"
#include "rwc/optimizer/incremental.hpp"
#include "rwc/optimizer/local_search.hpp"
#include "rwc/optimizer/moves.hpp"
#include "rwc/reporting.hpp"
#include "rwc/scenario.hpp"
#include "rwc/synthgen.hpp"
