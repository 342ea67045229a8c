//! Column vocabularies per theme.

use crate::chartcore::Theme;

pub(crate) struct CategoricalVocab {
    pub name: &'static str,
    pub values: &'static [&'static str],
}

#[derive(Clone, Copy)]
pub(crate) struct NumericVocab {
    pub name: &'static str,
    /// Typical magnitude of values.
    pub scale: f64,
    /// May go negative (e.g. temperatures, net change).
    pub signed: bool,
    /// Aggregate by sum rather than mean when rows collapse onto one x.
    pub additive: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Granularity {
    Year,
    Month,
}

pub(crate) struct TemporalVocab {
    pub name: &'static str,
    pub granularity: Granularity,
}

pub(crate) struct ThemeVocab {
    pub categorical: &'static [CategoricalVocab],
    pub numeric: &'static [NumericVocab],
    pub temporal: &'static [TemporalVocab],
    /// Words describing the kind of organization the data is about.
    pub entity_kinds: &'static [&'static str],
}

const REGIONS: &[&str] = &[
    "North",
    "South",
    "East",
    "West",
    "Central",
    "Northeast",
    "Northwest",
    "Southeast",
    "Southwest",
    "Coastal",
    "Highland",
    "Lowland",
    "Midlands",
    "Islands",
    "Metro",
    "Rural",
];
const COUNTRIES: &[&str] = &[
    "Canada",
    "Mexico",
    "Brazil",
    "Chile",
    "France",
    "Germany",
    "Spain",
    "Italy",
    "Norway",
    "Poland",
    "Egypt",
    "Kenya",
    "India",
    "Japan",
    "Vietnam",
    "Australia",
];
const CITIES: &[&str] = &[
    "Austin", "Denver", "Boston", "Seattle", "Chicago", "Atlanta", "Phoenix", "Dallas", "Miami", "Portland", "Detroit",
    "Memphis", "Oakland", "Tampa", "Omaha", "Tucson",
];
const PRODUCTS: &[&str] = &[
    "Laptops",
    "Tablets",
    "Phones",
    "Monitors",
    "Printers",
    "Cameras",
    "Headphones",
    "Speakers",
    "Keyboards",
    "Routers",
    "Watches",
    "Consoles",
];
const SALE_METHODS: &[&str] = &["Online", "In Store", "Outlet", "Wholesale", "Catalog", "Phone Order"];
const AGE_GROUPS: &[&str] = &["Under 18", "18 to 24", "25 to 34", "35 to 44", "45 to 54", "55 to 64", "Over 65"];
const SEASONS: &[&str] = &["Winter", "Spring", "Summer", "Autumn"];
const ROOM_TYPES: &[&str] = &["Single", "Double", "Suite", "Family", "Studio", "Deluxe", "Penthouse"];
const HOTELS: &[&str] = &["City Hotel", "Resort Hotel", "Airport Inn", "Beach Lodge", "Mountain Lodge", "Harbor Inn"];
const CHANNELS: &[&str] = &["Direct", "Travel Agent", "Corporate", "Online Agency", "Group", "Walk In"];
const OCCUPATIONS: &[&str] = &[
    "Teachers",
    "Nurses",
    "Engineers",
    "Farmers",
    "Clerks",
    "Drivers",
    "Chefs",
    "Lawyers",
    "Artists",
    "Miners",
    "Pilots",
    "Builders",
];
const EDUCATION: &[&str] = &["Primary", "Secondary", "Vocational", "Bachelor", "Master", "Doctorate"];
const SOURCES: &[&str] = &["Coal", "Gas", "Nuclear", "Hydro", "Wind", "Solar", "Biomass", "Geothermal", "Oil"];
const SECTORS: &[&str] =
    &["Industry", "Transport", "Residential", "Commercial", "Agriculture", "Aviation", "Shipping", "Waste"];
const ROADS: &[&str] = &[
    "Main Street",
    "Ring Road",
    "Harbor Bridge",
    "Airport Road",
    "River Drive",
    "Park Avenue",
    "Canal Street",
    "Hill Road",
    "Station Road",
    "Market Lane",
    "Bay Road",
    "Lake Drive",
];
const VEHICLES: &[&str] = &["Cars", "Buses", "Trucks", "Bicycles", "Motorcycles", "Vans", "Trams"];
const GENRES: &[&str] = &[
    "Drama",
    "Comedy",
    "Action",
    "Horror",
    "Romance",
    "Thriller",
    "Documentary",
    "Animation",
    "Fantasy",
    "Western",
    "Musical",
    "Mystery",
];
const PLATFORMS: &[&str] = &["Web", "Mobile", "Console", "Desktop", "Television", "Kiosk"];
const WAREHOUSES: &[&str] = &["Depot A", "Depot B", "Depot C", "Depot D", "Depot E", "Depot F", "Depot G", "Depot H"];
const ITEM_CLASSES: &[&str] = &[
    "Fasteners",
    "Cables",
    "Valves",
    "Pumps",
    "Filters",
    "Bearings",
    "Gaskets",
    "Sensors",
    "Motors",
    "Hoses",
    "Brackets",
    "Switches",
];
const DEPARTMENTS: &[&str] = &[
    "Health",
    "Education",
    "Defense",
    "Housing",
    "Transport",
    "Culture",
    "Police",
    "Parks",
    "Water",
    "Libraries",
    "Welfare",
    "Research",
];
const EXPENSE_TYPES: &[&str] = &["Salaries", "Equipment", "Travel", "Training", "Maintenance", "Consulting"];
const FACULTIES: &[&str] = &[
    "Arts",
    "Science",
    "Medicine",
    "Law",
    "Business",
    "Engineering",
    "Nursing",
    "Music",
    "Design",
    "Economics",
    "Education",
    "Pharmacy",
];
const STUDY_MODES: &[&str] = &["Full Time", "Part Time", "Online", "Exchange", "Evening"];
const GASES: &[&str] = &["Carbon Dioxide", "Methane", "Nitrous Oxide", "Ozone", "Sulfur Dioxide"];
const STATIONS: &[&str] = &[
    "Airport",
    "Harbor",
    "Valley",
    "Summit",
    "Riverside",
    "Downtown",
    "Forest",
    "Desert",
    "Lakeside",
    "Plateau",
    "Canyon",
    "Meadow",
];
const MONTH_NAMES: &[&str] = &[
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

const fn num(name: &'static str, scale: f64, signed: bool, additive: bool) -> NumericVocab {
    NumericVocab { name, scale, signed, additive }
}

const fn cat(name: &'static str, values: &'static [&'static str]) -> CategoricalVocab {
    CategoricalVocab { name, values }
}

const YEAR: TemporalVocab = TemporalVocab { name: "year", granularity: Granularity::Year };
const MONTH: TemporalVocab = TemporalVocab { name: "month", granularity: Granularity::Month };

static SALES: ThemeVocab = ThemeVocab {
    categorical: &[cat("region", REGIONS), cat("product", PRODUCTS), cat("sale method", SALE_METHODS)],
    numeric: &[
        num("revenue", 50_000.0, false, true),
        num("units sold", 2_000.0, false, true),
        num("profit margin", 20.0, true, false),
        num("average price", 300.0, false, false),
    ],
    temporal: &[YEAR, MONTH],
    entity_kinds: &["Retail", "Stores", "Trading", "Outfitters"],
};

static POPULATION: ThemeVocab = ThemeVocab {
    categorical: &[cat("country", COUNTRIES), cat("age group", AGE_GROUPS), cat("city", CITIES)],
    numeric: &[
        num("population", 1_000_000.0, false, true),
        num("growth rate", 2.0, true, false),
        num("median age", 38.0, false, false),
        num("birth rate", 12.0, false, false),
    ],
    temporal: &[YEAR],
    entity_kinds: &["Census Bureau", "Statistics Office", "Demographics Institute"],
};

static TEMPERATURE: ThemeVocab = ThemeVocab {
    categorical: &[cat("station", STATIONS), cat("season", SEASONS), cat("city", CITIES)],
    numeric: &[
        num("temperature", 15.0, true, false),
        num("rainfall", 80.0, false, true),
        num("humidity", 60.0, false, false),
        num("temperature anomaly", 1.0, true, false),
    ],
    temporal: &[YEAR, MONTH],
    entity_kinds: &["Weather Service", "Climate Center", "Observatory"],
};

static BOOKINGS: ThemeVocab = ThemeVocab {
    categorical: &[cat("hotel", HOTELS), cat("room type", ROOM_TYPES), cat("booking channel", CHANNELS)],
    numeric: &[
        num("bookings", 800.0, false, true),
        num("cancellations", 90.0, false, true),
        num("average daily rate", 120.0, false, false),
        num("occupancy rate", 70.0, false, false),
    ],
    temporal: &[MONTH, YEAR],
    entity_kinds: &["Hotels", "Resorts", "Hospitality Group"],
};

static INCOME: ThemeVocab = ThemeVocab {
    categorical: &[cat("occupation", OCCUPATIONS), cat("education level", EDUCATION), cat("region", REGIONS)],
    numeric: &[
        num("median income", 45_000.0, false, false),
        num("household income", 60_000.0, false, false),
        num("tax paid", 9_000.0, false, true),
        num("savings rate", 8.0, true, false),
    ],
    temporal: &[YEAR],
    entity_kinds: &["Labor Department", "Revenue Agency", "Economic Council"],
};

static ENERGY: ThemeVocab = ThemeVocab {
    categorical: &[cat("energy source", SOURCES), cat("sector", SECTORS), cat("country", COUNTRIES)],
    numeric: &[
        num("electricity generation", 40_000.0, false, true),
        num("consumption", 30_000.0, false, true),
        num("capacity", 5_000.0, false, true),
        num("price per kilowatt hour", 0.2, false, false),
    ],
    temporal: &[YEAR, MONTH],
    entity_kinds: &["Power", "Energy Agency", "Grid Operator", "Utilities"],
};

static TRAFFIC: ThemeVocab = ThemeVocab {
    categorical: &[cat("road", ROADS), cat("vehicle type", VEHICLES), cat("city", CITIES)],
    numeric: &[
        num("vehicle count", 12_000.0, false, true),
        num("average speed", 45.0, false, false),
        num("accidents", 30.0, false, true),
        num("travel time", 25.0, false, false),
    ],
    temporal: &[MONTH, YEAR],
    entity_kinds: &["Transit Authority", "Roads Department", "Traffic Bureau"],
};

static RATINGS: ThemeVocab = ThemeVocab {
    categorical: &[cat("genre", GENRES), cat("platform", PLATFORMS), cat("country", COUNTRIES)],
    numeric: &[
        num("average rating", 3.8, false, false),
        num("review count", 5_000.0, false, true),
        num("viewers", 200_000.0, false, true),
        num("score change", 0.5, true, false),
    ],
    temporal: &[YEAR, MONTH],
    entity_kinds: &["Studios", "Reviews", "Media", "Streaming"],
};

static INVENTORY: ThemeVocab = ThemeVocab {
    categorical: &[cat("warehouse", WAREHOUSES), cat("item class", ITEM_CLASSES), cat("region", REGIONS)],
    numeric: &[
        num("stock level", 7_000.0, false, true),
        num("reorder quantity", 1_500.0, false, true),
        num("days of supply", 30.0, false, false),
        num("shrinkage", 2.0, false, false),
    ],
    temporal: &[MONTH, YEAR],
    entity_kinds: &["Logistics", "Supply", "Distribution", "Warehousing"],
};

static BUDGET: ThemeVocab = ThemeVocab {
    categorical: &[cat("department", DEPARTMENTS), cat("expense type", EXPENSE_TYPES), cat("region", REGIONS)],
    numeric: &[
        num("allocated budget", 2_000_000.0, false, true),
        num("actual spending", 1_800_000.0, false, true),
        num("budget variance", 50_000.0, true, false),
        num("headcount", 300.0, false, true),
    ],
    temporal: &[YEAR],
    entity_kinds: &["City Council", "Treasury", "County Government", "Ministry"],
};

static ENROLLMENT: ThemeVocab = ThemeVocab {
    categorical: &[cat("faculty", FACULTIES), cat("study mode", STUDY_MODES), cat("country", COUNTRIES)],
    numeric: &[
        num("enrolled students", 3_000.0, false, true),
        num("graduation rate", 75.0, false, false),
        num("applications", 9_000.0, false, true),
        num("tuition fee", 12_000.0, false, false),
    ],
    temporal: &[YEAR],
    entity_kinds: &["University", "College", "Institute of Technology", "Academy"],
};

static EMISSIONS: ThemeVocab = ThemeVocab {
    categorical: &[cat("sector", SECTORS), cat("gas", GASES), cat("country", COUNTRIES)],
    numeric: &[
        num("carbon emissions", 400.0, false, true),
        num("emission intensity", 0.4, false, false),
        num("emission change", 5.0, true, false),
        num("offsets purchased", 40.0, false, true),
    ],
    temporal: &[YEAR, MONTH],
    entity_kinds: &["Environment Agency", "Climate Registry", "Carbon Monitor"],
};

pub(crate) fn theme_vocab(theme: Theme) -> &'static ThemeVocab {
    match theme {
        Theme::Sales => &SALES,
        Theme::Population => &POPULATION,
        Theme::Temperature => &TEMPERATURE,
        Theme::Bookings => &BOOKINGS,
        Theme::Income => &INCOME,
        Theme::Energy => &ENERGY,
        Theme::Traffic => &TRAFFIC,
        Theme::Ratings => &RATINGS,
        Theme::Inventory => &INVENTORY,
        Theme::Budget => &BUDGET,
        Theme::Enrollment => &ENROLLMENT,
        Theme::Emissions => &EMISSIONS,
    }
}

pub(crate) fn numeric_vocab(theme: Theme, name: &str) -> Option<NumericVocab> {
    theme_vocab(theme).numeric.iter().find(|n| n.name == name).copied()
}

pub(crate) fn month_name(m: u32) -> &'static str {
    MONTH_NAMES[(m as usize + 11) % 12]
}

const NAME_HEADS: &[&str] = &[
    "Al", "Bel", "Cor", "Dun", "El", "Fal", "Gar", "Hal", "Is", "Jor", "Kel", "Lor", "Mar", "Nor", "Or", "Pel", "Quin",
    "Ros", "Sel", "Tor", "Ul", "Val", "Wen", "Yar", "Zan", "Bran", "Cal", "Dor", "Fen", "Gil",
];
const NAME_MIDS: &[&str] = &["a", "e", "i", "o", "u", "ar", "en", "is", "or", "an", "el", "ow"];
const NAME_TAILS: &[&str] = &[
    "ton", "ford", "ville", "mere", "wick", "dale", "field", "port", "crest", "brook", "haven", "stead", "ridge",
    "moor", "gate", "wood",
];

/// A pronounceable proper name such as "Belaford".
pub(crate) fn entity_name(head: usize, mid: usize, tail: usize) -> String {
    format!(
        "{}{}{}",
        NAME_HEADS[head % NAME_HEADS.len()],
        NAME_MIDS[mid % NAME_MIDS.len()],
        NAME_TAILS[tail % NAME_TAILS.len()]
    )
}

pub(crate) const NAME_PARTS: (usize, usize, usize) = (NAME_HEADS.len(), NAME_MIDS.len(), NAME_TAILS.len());
