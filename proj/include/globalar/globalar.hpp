#pragma once

#include <globalar/bounds.hpp>
#include <globalar/dataset.hpp>
#include <globalar/embed.hpp>
#include <globalar/error.hpp>
#include <globalar/evaluate.hpp>
#include <globalar/experiment.hpp>
#include <globalar/least_squares.hpp>
#include <globalar/mlp.hpp>
#include <globalar/models.hpp>
#include <globalar/partition.hpp>
#include <globalar/pipeline.hpp>
#include <globalar/preprocess.hpp>
#include <globalar/report.hpp>
