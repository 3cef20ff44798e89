use std::collections::HashMap;
use std::io::Write;

use cluster_explain::dataset::{
    load_csv, read_csv, AttributeKind, ClusterId, Column, DataError, Dataset,
};
use proptest::prelude::*;

fn arb_column(rows: usize, idx: usize) -> impl Strategy<Value = Column> {
    let numeric = prop::collection::vec(prop::option::weighted(0.9, -1e6f64..1e6), rows)
        .prop_map(move |v| Column::numeric(format!("num{idx}"), v).unwrap());
    // arbitrary text that is not blank; commas, quotes and spaces included
    let text = "[a-zA-Z0-9 ,\"'_-]{0,5}[a-zA-Z0-9,\"]";
    let categorical = prop::collection::vec(prop::option::weighted(0.9, text), rows)
        .prop_map(move |v| Column::categorical(format!("cat {idx}"), &v));
    prop_oneof![numeric, categorical]
}

fn arb_dataset() -> impl Strategy<Value = Dataset> {
    (1usize..40, 1usize..5).prop_flat_map(|(rows, cols)| {
        let columns: Vec<_> = (0..cols).map(|i| arb_column(rows, i)).collect();
        let labels =
            prop::collection::vec(prop::sample::select(vec!["0", "1", "2", "c-x", "10"]), rows);
        (columns, labels).prop_map(|(columns, labels)| {
            Dataset::new(
                columns,
                labels.into_iter().map(ClusterId::from).collect(),
                "cluster",
            )
            .unwrap()
        })
    })
}

proptest! {
    #[test]
    fn csv_round_trip(d in arb_dataset()) {
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let hints: HashMap<String, AttributeKind> = d.kinds().into_iter().collect();
        let back = read_csv(buf.as_slice(), "cluster", &hints).unwrap();
        prop_assert_eq!(back.columns(), d.columns());
        prop_assert_eq!(back.cluster_ids(), d.cluster_ids());
        prop_assert_eq!(back.label_codes(), d.label_codes());
        for c in d.cluster_ids() {
            prop_assert_eq!(back.cluster_rows(c).unwrap(), d.cluster_rows(c).unwrap());
        }
    }

    #[test]
    fn cluster_rows_partition_the_rows(d in arb_dataset()) {
        let mut all: Vec<usize> = d.cluster_ids().iter().flat_map(|c| d.cluster_rows(c).unwrap().to_vec()).collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..d.n_rows()).collect::<Vec<_>>());
    }
}

#[test]
fn three_ninety_rows_with_373_in_cluster_zero() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "age,cluster").unwrap();
    for i in 0..390 {
        writeln!(
            file,
            "{},{}",
            16 + i % 60,
            if i < 373 { 0 } else { 1 + i % 2 }
        )
        .unwrap();
    }
    file.flush().unwrap();
    let d = load_csv(file.path(), "cluster", &HashMap::new()).unwrap();
    assert_eq!(d.n_rows(), 390);
    assert_eq!(d.cluster_rows(&ClusterId::from(0)).unwrap().len(), 373);
    assert_eq!(
        d.column(d.attr_by_name("age").unwrap()).kind(),
        AttributeKind::Numeric
    );
    assert!(matches!(
        d.cluster_rows(&ClusterId::from(9)),
        Err(DataError::UnknownCluster(_))
    ));
}

#[test]
fn thousand_rows_of_three_codes_are_categorical() {
    let mut text = String::from("code,cluster\n");
    for i in 0..1000 {
        text.push_str(&format!("{},{}\n", i % 3, i % 2));
    }
    let d = read_csv(text.as_bytes(), "cluster", &HashMap::new()).unwrap();
    let col = d.column(d.attr_by_name("code").unwrap());
    assert_eq!(col.kind(), AttributeKind::Categorical);
    assert_eq!(col.as_categorical().unwrap().0, ["0", "1", "2"]);
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_csv("/nonexistent/data.csv", "cluster", &HashMap::new()).unwrap_err();
    assert!(matches!(err, DataError::Io { .. }));
}
