#pragma once

#include "profilemap/clustering.hpp"
#include "profilemap/error.hpp"
#include "profilemap/graph_io.hpp"
#include "profilemap/ingest.hpp"
#include "profilemap/layout.hpp"
#include "profilemap/mapgraph.hpp"
#include "profilemap/pipeline.hpp"
#include "profilemap/similarity.hpp"
#include "profilemap/text.hpp"
#include "profilemap/weighting.hpp"
