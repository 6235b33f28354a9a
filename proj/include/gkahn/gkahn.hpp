#pragma once

#include "gkahn/bitset.hpp"
#include "gkahn/causality.hpp"
#include "gkahn/document.hpp"
#include "gkahn/event_structure.hpp"
#include "gkahn/fixpoint.hpp"
#include "gkahn/model.hpp"
#include "gkahn/network.hpp"
#include "gkahn/pomset.hpp"
#include "gkahn/poset.hpp"
#include "gkahn/report.hpp"
#include "gkahn/streams.hpp"
#include "gkahn/trace.hpp"
#include "gkahn/verdict.hpp"
