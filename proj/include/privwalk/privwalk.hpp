#pragma once

#include "privwalk/access.hpp"
#include "privwalk/errors.hpp"
#include "privwalk/estimators.hpp"
#include "privwalk/experiment.hpp"
#include "privwalk/graph.hpp"
#include "privwalk/ingest.hpp"
#include "privwalk/numeric.hpp"
#include "privwalk/theory.hpp"
#include "privwalk/walker.hpp"
