#pragma once

#include "attrwalk/edge_split.hpp"
#include "attrwalk/error.hpp"
#include "attrwalk/features.hpp"
#include "attrwalk/graph.hpp"
#include "attrwalk/linkpred.hpp"
#include "attrwalk/matrix.hpp"
#include "attrwalk/rng.hpp"
#include "attrwalk/sgns.hpp"
#include "attrwalk/typing.hpp"
#include "attrwalk/walker.hpp"
