use qnnlab::data::{load_split, Task};
use qnnlab::qnn::{evaluate_accuracy, QnnArchitecture};
use qnnlab::victim::{train_victim, TrainConfig};

fn main() {
    let task = std::env::args().nth(1).unwrap();
    let seed: u64 = std::env::args().nth(2).unwrap().parse().unwrap();
    let root = std::path::PathBuf::from("/root/runs-calib/tasks");
    let split = load_split(&root, Task::parse(&task).unwrap()).unwrap();
    let report = train_victim(&split.train, &split.val, QnnArchitecture::default(), &TrainConfig::default(), seed).unwrap();
    let test = evaluate_accuracy(&report.model, &split.test).unwrap();
    println!("{task} seed {seed}: best {} test {test:.4}", report.best_epoch);
    for (i, (l, v)) in report.epoch_mean_loss.iter().zip(&report.epoch_val_accuracy).enumerate() {
        println!("  ep {:2}  loss {l:.4}  val {v:.4}", i + 1);
    }
}
