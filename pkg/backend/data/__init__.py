# Initialize data package
