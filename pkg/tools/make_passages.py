"""Generate render/data/passages.json with verified word counts and splits."""
from __future__ import annotations

import json
from pathlib import Path

PASSAGES = [
    {
        "passage_id": "tide-pools",
        "grade_level": 8,
        "body": (
            "When the ocean pulls back from the shore twice each day, it leaves "
            "behind small pockets of seawater trapped among the rocks. These tide "
            "pools look calm, but they are some of the most demanding places an "
            "animal can live. A creature in a tide pool must survive crashing "
            "waves, hungry birds, and hours of hot sun, all in a puddle that may "
            "be no bigger than a kitchen sink. Sea stars cling to the stone with "
            "hundreds of tiny tube feet, holding on so firmly that the surf "
            "cannot tear them loose. Hermit crabs solve the housing problem by "
            "borrowing empty snail shells, trading up for larger ones as they "
            "grow. Anemones fold their soft bodies inward at low tide, sealing in "
            "a private supply of water until the sea returns. Scientists like to "
            "study tide pools because the animals there live at the edge of what "
            "is possible. A small change in temperature or in the level of the "
            "sea shows up quickly in who survives. In that way, a humble ring of "
            "rock and water works like a natural laboratory, recording changes "
            "in the wider ocean long before they are easy to see anywhere else."
        ),
    },
    {
        "passage_id": "bicycle-balance",
        "grade_level": 8,
        "body": (
            "A bicycle standing still tips over almost at once, yet the same "
            "bicycle rolling down the street seems to balance itself. For more "
            "than a century, people assumed the spinning wheels acted like "
            "gyroscopes and simply refused to lean. The real story is more "
            "interesting. When a moving bicycle starts to lean to one side, its "
            "front wheel automatically steers in the same direction. That small "
            "turn brings the wheels back underneath the rider, the way you might "
            "step sideways to catch yourself after a stumble. Engineers have "
            "built strange test bicycles to prove the point. Some had extra "
            "wheels spinning backwards to cancel the gyroscope effect, and they "
            "still balanced on their own. One machine even balanced with its "
            "steering reversed, as long as its weight was arranged carefully. "
            "The lesson is that balance comes from geometry, not from one magic "
            "part. The angle of the front fork, the position of the weight, and "
            "the speed of the ride all work together. Designers still argue "
            "about which combination is best, and racing teams treat their "
            "exact measurements like secrets. The next time a bicycle coasts "
            "past with no hands on the bars, remember that its shape is quietly "
            "doing the riding."
        ),
    },
    {
        "passage_id": "sourdough-loaf",
        "grade_level": 8,
        "body": (
            "Long before stores sold packets of yeast, bakers raised their bread "
            "with a living paste of flour and water called a starter. A starter "
            "begins as nothing more than those two ingredients stirred together "
            "in a jar. Within days, wild yeasts and friendly bacteria from the "
            "flour and the air move in and begin to feed. The yeasts release gas "
            "that will later puff up the dough, while the bacteria produce the "
            "mild acid that gives sourdough bread its name and its tang. Keeping "
            "a starter alive is a small daily chore. The baker throws part of it "
            "away, then stirs in fresh flour and water, a routine called "
            "feeding. A well-fed starter rises and falls in its jar on a "
            "schedule so regular that some bakers can tell the time by it. "
            "Families have kept the same starter going for generations, carrying "
            "spoonfuls of it across oceans in covered wagons and suitcases. "
            "Scientists who study these jars find that each one holds a slightly "
            "different mix of microbes, shaped by its flour, its kitchen, and "
            "its keeper. That is why two bakers can follow the same recipe and "
            "still pull two different loaves from the oven, each one a portrait "
            "of its own small ecosystem."
        ),
    },
    {
        "passage_id": "desert-rain",
        "grade_level": 8,
        "body": (
            "In the driest deserts of the world, rain may stay away for years at "
            "a time. When it finally arrives, the change is sudden and "
            "spectacular. Seeds that have waited in the sand, some for a decade, "
            "sprout within hours of getting wet. In a week the bare ground wears "
            "a thin green fuzz, and soon after that whole valleys disappear "
            "under carpets of flowers. Botanists call the event a super bloom, "
            "and no one can predict exactly when one will happen. The seeds are "
            "not simply patient. Many carry chemical locks in their coats that "
            "dissolve only after a long, soaking rain. A light shower is not "
            "enough to open them, which protects the plants from sprouting into "
            "a false spring that would kill them. Desert animals answer the "
            "bloom as quickly as the plants. Bees and butterflies appear in "
            "clouds, rodents fatten on fresh seeds, and birds of prey follow "
            "the rodents. For a month or two the desert runs like a festival, "
            "spending energy it has saved for years. Then the heat returns, the "
            "flowers dry into straw, and a new generation of seeds settles into "
            "the sand to begin the long wait again."
        ),
    },
    {
        "passage_id": "city-starlings",
        "grade_level": 8,
        "body": (
            "On winter evenings, just before dark, enormous flocks of starlings "
            "gather above certain cities and begin to fly as one. Thousands of "
            "birds swirl into shapes that stretch and fold like smoke, a display "
            "known as a murmuration. The flock can split around a diving hawk "
            "and close again in seconds, without a single collision. For a long "
            "time, people believed the birds followed a leader or shared some "
            "mysterious signal. High-speed cameras finally revealed a simpler "
            "rule. Each starling watches only its closest neighbors, usually "
            "about seven of them, and copies their speed and direction. When "
            "one bird turns, its neighbors turn a fraction of a second later, "
            "and the movement ripples across the sky faster than any single "
            "bird could fly. No starling sees the whole pattern, yet together "
            "they paint one. Scientists who study traffic jams, crowds, and "
            "even swarms of robots borrow ideas from murmurations, because the "
            "birds solve a hard problem with almost no information. The "
            "starlings are not trying to be beautiful. The dense, shifting "
            "cloud confuses predators and helps the birds settle safely into "
            "their roost. The beauty, like the safety, comes free with the "
            "rules."
        ),
    },
    {
        "passage_id": "lighthouse-lenses",
        "grade_level": 12,
        "body": (
            "For most of maritime history, the problem with a lighthouse was "
            "not producing light but refusing to waste it. An open flame "
            "scatters its energy in every direction, and the faint fraction "
            "that happens to travel toward the horizon is swallowed by fog "
            "long before a ship can use it. Early keepers backed their lamps "
            "with polished metal mirrors, which helped, but the decisive "
            "invention arrived in 1822, when the French physicist Augustin "
            "Fresnel unveiled a lens built on an entirely new principle. "
            "Fresnel realized that only the surface of a lens bends light, so "
            "he carved away the useless interior glass and arranged the "
            "remaining curved rings like the layers of a beehive around the "
            "flame. His assembly captured most of the lamp's output and "
            "pressed it into a single horizontal sheet of light that could "
            "reach more than twenty miles out to sea. Sailors who first saw a "
            "Fresnel beam reported it as a new star on the coast. The lenses "
            "were ranked into orders by size, from towering first-order giants "
            "taller than a person down to small harbor lights, and each "
            "station turned its lens at a distinctive rhythm so that captains "
            "could read the flashes like a signature. A navigator counting "
            "seconds between flashes could name the coastline in complete "
            "darkness. The same stepped-ring design now lives quietly in "
            "traffic signals, camera flashes, and the thin plastic magnifiers "
            "sold in bookstores, but its first and grandest work was turning "
            "scattered firelight into a language that ships could trust with "
            "their lives."
        ),
    },
    {
        "passage_id": "canal-locks",
        "grade_level": 12,
        "body": (
            "A canal looks like the simplest possible road, a flat ribbon of "
            "still water, yet the landscape it crosses is rarely flat. The "
            "elegant trick that lets a boat climb a hill is the lock, a "
            "chamber of masonry with watertight gates at each end and no "
            "machinery more exotic than gravity. A vessel traveling uphill "
            "glides into the chamber, the gates close behind it, and water is "
            "admitted from the higher reach through small sluices. As the "
            "chamber fills, the boat rises like a toy in a bathtub until its "
            "deck stands level with the upper canal, at which point the far "
            "gates swing open and the journey resumes. Descending reverses "
            "the ritual. Nothing lifts the boat except the water itself, and "
            "the water moves only because it is allowed to seek its own "
            "level. The design is centuries old, refined in Renaissance Italy "
            "and scaled up ever since, and its grandest expression remains "
            "the Panama Canal, where chambers a thousand feet long raise "
            "ocean-going ships eighty-five feet above the sea. Each transit "
            "spends millions of gallons of fresh water, released downhill "
            "lock by lock, which is why the canal's true engine is not a "
            "pump or a turbine but the rain that refills its mountain lake. "
            "Engineers planning for drier decades now design locks with side "
            "basins that catch and reuse most of each flush, proof that even "
            "a machine made of water must learn to conserve its fuel. "
            "Watching a ship rise silently in a stone box, it is easy to "
            "forget that the entire performance is powered by weather."
        ),
    },
]


def main() -> None:
    out = []
    for p in PASSAGES:
        words = p["body"].split()
        n = len(words)
        screens = 4 if p["grade_level"] == 8 else 6
        lo, hi = (150, 250) if p["grade_level"] == 8 else (250, 350)
        assert lo <= n <= hi, (p["passage_id"], n)
        bounds = [round(i * n / screens) for i in range(screens + 1)]
        out.append(
            {
                "passage_id": p["passage_id"],
                "grade_level": p["grade_level"],
                "body": p["body"],
                "screen_bounds": bounds,
            }
        )
        print(p["passage_id"], n, bounds)
    path = Path(__file__).resolve().parents[1] / "src/themeloop/render/data/passages.json"
    path.write_text(json.dumps({"passages": out}, indent=2) + "\n")
    print("wrote", path)


if __name__ == "__main__":
    main()
