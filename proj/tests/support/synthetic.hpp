#pragma once

#include "duet/story.hpp"

#include <random>

namespace duet::testing {

struct SyntheticStory {
    profile::SessionConfig config;
    story::StoryFramework framework;  // confirmed
};

/// Seeded generator of confirmed frameworks: 4-10 alternating paragraphs,
/// 1-5 target words per language drawn from pools that include nested words
/// (猫 inside 熊猫, dog inside hot dog), each word planted 1-3 times, and
/// Freytag stages tiling the paragraphs in order. Throws if a draft fails
/// validation, which would be a generator bug.
SyntheticStory synthetic_story(std::mt19937& rng);

}  // namespace duet::testing
