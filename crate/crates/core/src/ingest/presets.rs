use super::{ColumnMapping, Grouping};

/// Column names and grouping for one of the benchmark event logs after
/// conversion to the canonical TSV layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetPreset {
    pub name: &'static str,
    pub session_col: &'static str,
    pub item_col: &'static str,
    pub time_col: &'static str,
    pub grouping: Grouping,
}

impl DatasetPreset {
    pub fn mapping(&self) -> ColumnMapping {
        ColumnMapping::by_name(self.session_col, self.item_col, self.time_col)
    }

    pub fn find(name: &str) -> Option<&'static DatasetPreset> {
        PRESETS.iter().find(|p| p.name.eq_ignore_ascii_case(name))
    }
}

pub const PRESETS: &[DatasetPreset] = &[
    DatasetPreset {
        name: "grocery",
        session_col: "reviewerID",
        item_col: "asin",
        time_col: "unixReviewTime",
        grouping: Grouping::SessionPerDay,
    },
    DatasetPreset {
        name: "cellphones",
        session_col: "reviewerID",
        item_col: "asin",
        time_col: "unixReviewTime",
        grouping: Grouping::SessionPerDay,
    },
    DatasetPreset {
        name: "cosmetics",
        session_col: "user_session",
        item_col: "product_id",
        time_col: "timestamp",
        grouping: Grouping::Session,
    },
    DatasetPreset {
        name: "diginetica",
        session_col: "sessionId",
        item_col: "itemId",
        time_col: "timestamp",
        grouping: Grouping::Session,
    },
    DatasetPreset {
        name: "yoochoose",
        session_col: "session_id",
        item_col: "item_id",
        time_col: "timestamp",
        grouping: Grouping::Session,
    },
    DatasetPreset {
        name: "tmall",
        session_col: "user_id",
        item_col: "item_id",
        time_col: "timestamp",
        grouping: Grouping::SessionPerDay,
    },
];
