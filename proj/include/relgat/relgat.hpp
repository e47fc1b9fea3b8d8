// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "relgat/attention.hpp"
#include "relgat/detection_file.hpp"
#include "relgat/errors.hpp"
#include "relgat/finite_diff.hpp"
#include "relgat/fusion.hpp"
#include "relgat/geometry.hpp"
#include "relgat/gradcheck.hpp"
#include "relgat/graph.hpp"
#include "relgat/implicit_gat.hpp"
#include "relgat/json_io.hpp"
#include "relgat/numerics.hpp"
#include "relgat/params_io.hpp"
#include "relgat/pipeline.hpp"
#include "relgat/rng.hpp"
#include "relgat/semantic_classifier.hpp"
#include "relgat/synthetic.hpp"
#include "relgat/typed_gat.hpp"
