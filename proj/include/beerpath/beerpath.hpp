#pragma once

// Umbrella header for the beerpath library.

#include "beerpath/counters.hpp"
#include "beerpath/dist_pair.hpp"
#include "beerpath/generators.hpp"
#include "beerpath/graph.hpp"
#include "beerpath/kgraph.hpp"
#include "beerpath/oracle.hpp"
#include "beerpath/query_structures.hpp"
#include "beerpath/serialize.hpp"
#include "beerpath/spqr.hpp"
#include "beerpath/td.hpp"
#include "beerpath/tri_index.hpp"
#include "beerpath/tri_query.hpp"
#include "beerpath/verify.hpp"
#include "beerpath/weight.hpp"
