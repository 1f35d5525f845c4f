#pragma once

// Umbrella header: the whole library in one include.

#include "dsens/config.hpp"
#include "dsens/csv_io.hpp"
#include "dsens/dataset.hpp"
#include "dsens/dcs.hpp"
#include "dsens/des.hpp"
#include "dsens/evaluation.hpp"
#include "dsens/experiment.hpp"
#include "dsens/hardness.hpp"
#include "dsens/kmeans.hpp"
#include "dsens/knn.hpp"
#include "dsens/linear.hpp"
#include "dsens/pool.hpp"
#include "dsens/region.hpp"
#include "dsens/report.hpp"
#include "dsens/rng.hpp"
#include "dsens/selection.hpp"
#include "dsens/split.hpp"
#include "dsens/standardize.hpp"
#include "dsens/synthetic.hpp"
